use serde::{Deserialize, Serialize};

use crate::robust::{Classifier, LinearModel, SelectiveLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "models", rename_all = "snake_case")]
pub enum Discriminators {
    /// `x` is kept when `h` and every `c_t` agree.
    Rejectron(Vec<LinearModel>),
    /// `x` is kept when every pair `(c_t, c'_t)` agrees.
    URejectron(Vec<(LinearModel, LinearModel)>),
}

/// The region a selective classifier answers on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSet {
    pub base: Option<LinearModel>,
    pub discriminators: Discriminators,
    /// ε of the run that produced it.
    pub eps: f64,
}

impl SelectionSet {
    pub fn len(&self) -> usize {
        match &self.discriminators {
            Discriminators::Rejectron(c) => c.len(),
            Discriminators::URejectron(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        select_member(self, x)
    }
}

pub fn select_member(s: &SelectionSet, x: &[f64]) -> bool {
    match &s.discriminators {
        Discriminators::Rejectron(cs) => match &s.base {
            Some(h) => {
                let y = h.predict(x);
                cs.iter().all(|c| c.predict(x) == y)
            }
            None => cs.windows(2).all(|w| w[0].predict(x) == w[1].predict(x)),
        },
        Discriminators::URejectron(pairs) => pairs.iter().all(|(c, d)| c.predict(x) == d.predict(x)),
    }
}

/// `h(x)` on members of `s`, abstention elsewhere.
pub fn selective_classify<C: Classifier + ?Sized>(h: &C, s: &SelectionSet, x: &[f64]) -> SelectiveLabel {
    if select_member(s, x) {
        h.predict(x).into()
    } else {
        SelectiveLabel::Abstain
    }
}
