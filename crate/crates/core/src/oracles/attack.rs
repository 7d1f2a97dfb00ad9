use crate::error::Result;
use crate::robust::{
    check_dim, worst_case_point, Classifier, LinearModel, PerturbationSpec, Sample,
};

/// Perfect attack oracle for a halfspace.
///
/// Returns `None` when every `z ∈ U(x)` is labeled `y`, otherwise a witness.
/// For balls the witness is the analytic worst-case point; when the margin sits
/// exactly on `γ` that point lies on the decision boundary (closed-ball
/// convention: it still counts as a successful attack).
pub fn attack(
    model: &LinearModel,
    sample: &Sample,
    index: usize,
    spec: &PerturbationSpec,
) -> Result<Option<Vec<f64>>> {
    check_dim(model.dim(), sample.x.len())?;
    match spec {
        PerturbationSpec::LpBall { .. } if model.is_constant() => {
            Ok((model.predict(&sample.x) != sample.y).then(|| sample.x.clone()))
        }
        PerturbationSpec::LpBall { p, gamma } => {
            if sample.y.value() * model.margin(&sample.x, *p)? <= *gamma {
                Ok(Some(worst_case_point(model, &sample.x, sample.y, *p, *gamma)?))
            } else {
                Ok(None)
            }
        }
        _ => attack_by_enumeration(model, sample, index, spec),
    }
}

/// Attack any classifier over a finite perturbation set: first misclassified point.
pub fn attack_by_enumeration<C: Classifier + ?Sized>(
    clf: &C,
    sample: &Sample,
    index: usize,
    spec: &PerturbationSpec,
) -> Result<Option<Vec<f64>>> {
    Ok(spec
        .points(index, &sample.x)?
        .into_iter()
        .find(|z| clf.predict(z) != sample.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robust::Label;

    #[test]
    fn ball_attack_examples() {
        let m = LinearModel::homogeneous(vec![1.0, 0.0]);
        let b = PerturbationSpec::lp_ball(2.0, 1.0).unwrap();
        let z = attack(&m, &Sample::new(vec![0.5, 0.0], Label::Pos), 0, &b).unwrap();
        let z = z.unwrap();
        assert!((z[0] + 0.5).abs() < 1e-15 && z[1] == 0.0);
        assert!(attack(&m, &Sample::new(vec![3.0, 0.0], Label::Pos), 0, &b)
            .unwrap()
            .is_none());
    }

    #[test]
    fn finite_attack_scans_in_order() {
        let m = LinearModel::homogeneous(vec![1.0, 0.0]);
        let u = PerturbationSpec::finite_offsets(vec![vec![0.0, 0.0], vec![-2.0, 0.0]]).unwrap();
        let z = attack(&m, &Sample::new(vec![1.0, 0.0], Label::Pos), 0, &u).unwrap();
        assert_eq!(z, Some(vec![-1.0, 0.0]));
    }
}
