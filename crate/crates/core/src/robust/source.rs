use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::robust::sample::{Dataset, Sample};

/// A (possibly infinite) supply of labeled examples.
pub trait SampleSource {
    fn dim(&self) -> usize;

    /// Next example, or `None` once a finite source runs dry.
    fn next_sample(&mut self) -> Option<Sample>;

    /// Like `next_sample` but treats exhaustion as an error.
    fn draw(&mut self) -> Result<Sample> {
        self.next_sample().ok_or(Error::SourceExhausted)
    }
}

impl<S: SampleSource + ?Sized> SampleSource for &mut S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn next_sample(&mut self) -> Option<Sample> {
        (**self).next_sample()
    }
}

impl<S: SampleSource + ?Sized> SampleSource for Box<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn next_sample(&mut self) -> Option<Sample> {
        (**self).next_sample()
    }
}

/// Walks a dataset once, in order.
#[derive(Debug, Clone)]
pub struct DatasetSource {
    data: Dataset,
    pos: usize,
}

impl DatasetSource {
    pub fn new(data: Dataset) -> Self {
        DatasetSource { data, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }
}

impl SampleSource for DatasetSource {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn next_sample(&mut self) -> Option<Sample> {
        let s = self.data.samples().get(self.pos).cloned();
        if s.is_some() {
            self.pos += 1;
        }
        s
    }
}

/// Endless source that reshuffles the dataset at every epoch.
#[derive(Debug, Clone)]
pub struct ShuffledCycle {
    data: Dataset,
    order: Vec<usize>,
    pos: usize,
    rng: Rng,
}

impl ShuffledCycle {
    pub fn new(data: Dataset, rng: Rng) -> Self {
        let order = (0..data.len()).collect();
        let mut c = ShuffledCycle {
            data,
            order,
            pos: 0,
            rng,
        };
        c.order.shuffle(&mut c.rng);
        c
    }
}

impl SampleSource for ShuffledCycle {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn next_sample(&mut self) -> Option<Sample> {
        if self.data.is_empty() {
            return None;
        }
        if self.pos == self.order.len() {
            self.order.shuffle(&mut self.rng);
            self.pos = 0;
        }
        let s = self.data.samples()[self.order[self.pos]].clone();
        self.pos += 1;
        Some(s)
    }
}

/// Source backed by a closure.
pub struct FnSource<F> {
    dim: usize,
    f: F,
}

impl<F: FnMut() -> Option<Sample>> FnSource<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnSource { dim, f }
    }
}

impl<F: FnMut() -> Option<Sample>> SampleSource for FnSource<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn next_sample(&mut self) -> Option<Sample> {
        (self.f)()
    }
}
