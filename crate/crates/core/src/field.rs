//! Dense per-site fields over a rectangular window of `Z^2`.

use std::io::Write;

use crate::error::{Result, SirError};

/// Inclusive integer rectangle `[x_lo, x_hi] x [y_lo, y_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub x_lo: i64,
    pub x_hi: i64,
    pub y_lo: i64,
    pub y_hi: i64,
}

impl Window {
    pub fn new(x_lo: i64, x_hi: i64, y_lo: i64, y_hi: i64) -> Result<Self> {
        if x_lo > x_hi || y_lo > y_hi {
            return Err(SirError::Domain(format!(
                "empty window [{x_lo}, {x_hi}] x [{y_lo}, {y_hi}]"
            )));
        }
        Ok(Self { x_lo, x_hi, y_lo, y_hi })
    }

    /// The square `[-r, r]^2`.
    pub fn square(radius: i64) -> Self {
        let r = radius.max(0);
        Self { x_lo: -r, x_hi: r, y_lo: -r, y_hi: r }
    }

    pub fn point(x: i64, y: i64) -> Self {
        Self { x_lo: x, x_hi: x, y_lo: y, y_hi: y }
    }

    pub fn width(&self) -> usize {
        (self.x_hi - self.x_lo + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.y_hi - self.y_lo + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x_lo && x <= self.x_hi && y >= self.y_lo && y <= self.y_hi
    }

    /// Row-major index, rows indexed by `y`.
    #[inline]
    pub fn index(&self, x: i64, y: i64) -> Option<usize> {
        if self.contains(x, y) {
            Some((y - self.y_lo) as usize * self.width() + (x - self.x_lo) as usize)
        } else {
            None
        }
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (i64, i64) {
        let w = self.width();
        (self.x_lo + (idx % w) as i64, self.y_lo + (idx / w) as i64)
    }

    pub fn dilate(&self, r: i64) -> Self {
        Self {
            x_lo: self.x_lo - r,
            x_hi: self.x_hi + r,
            y_lo: self.y_lo - r,
            y_hi: self.y_hi + r,
        }
    }

    pub fn union(&self, other: &Window) -> Self {
        Self {
            x_lo: self.x_lo.min(other.x_lo),
            x_hi: self.x_hi.max(other.x_hi),
            y_lo: self.y_lo.min(other.y_lo),
            y_hi: self.y_hi.max(other.y_hi),
        }
    }

    pub fn intersect(&self, other: &Window) -> Option<Self> {
        let w = Self {
            x_lo: self.x_lo.max(other.x_lo),
            x_hi: self.x_hi.min(other.x_hi),
            y_lo: self.y_lo.max(other.y_lo),
            y_hi: self.y_hi.min(other.y_hi),
        };
        (w.x_lo <= w.x_hi && w.y_lo <= w.y_hi).then_some(w)
    }

    /// Nearest site of the window to `(x, y)`.
    #[inline]
    pub fn clamp(&self, x: i64, y: i64) -> (i64, i64) {
        (x.clamp(self.x_lo, self.x_hi), y.clamp(self.y_lo, self.y_hi))
    }

    pub fn on_boundary(&self, x: i64, y: i64) -> bool {
        self.contains(x, y)
            && (x == self.x_lo || x == self.x_hi || y == self.y_lo || y == self.y_hi)
    }

    /// Sites in row-major order.
    pub fn sites(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (self.y_lo..=self.y_hi).flat_map(move |y| (self.x_lo..=self.x_hi).map(move |x| (x, y)))
    }
}

/// Values over a window; sites outside the window read as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    window: Window,
    values: Vec<T>,
}

/// Proportions in `[0, 1]`.
pub type RealField = Field<f64>;
/// Individual counts in `[0, N]`.
pub type CountField = Field<u32>;

impl<T: Copy + Default> Field<T> {
    pub fn zeros(window: Window) -> Self {
        Self { window, values: vec![T::default(); window.len()] }
    }

    pub fn from_values(window: Window, values: Vec<T>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(SirError::Domain(format!(
                "{} values for a window of {} sites",
                values.len(),
                window.len()
            )));
        }
        Ok(Self { window, values })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, x: i64, y: i64) -> T {
        match self.window.index(x, y) {
            Some(i) => self.values[i],
            None => T::default(),
        }
    }

    /// Writes inside the window; returns `false` and does nothing outside it.
    pub fn set(&mut self, x: i64, y: i64, v: T) -> bool {
        match self.window.index(x, y) {
            Some(i) => {
                self.values[i] = v;
                true
            }
            None => false,
        }
    }

    /// Same values over another window, dropping sites that fall outside.
    pub fn resized(&self, window: Window) -> Self {
        let mut out = Self::zeros(window);
        if let Some(common) = self.window.intersect(&window) {
            let len = common.width();
            for y in common.y_lo..=common.y_hi {
                let src = self.window.index(common.x_lo, y).unwrap();
                let dst = window.index(common.x_lo, y).unwrap();
                out.values[dst..dst + len].copy_from_slice(&self.values[src..src + len]);
            }
        }
        out
    }

    pub fn map<U: Copy + Default>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field { window: self.window, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `(x, y, value)` triples in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, T)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| {
            let (x, y) = self.window.coords(i);
            (x, y, v)
        })
    }
}

impl<T: Copy + Default + std::fmt::Display> Field<T> {
    /// CSV with header `x,y,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,value")?;
        for (x, y, v) in self.iter() {
            writeln!(out, "{x},{y},{v}")?;
        }
        Ok(())
    }
}

impl RealField {
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl CountField {
    pub fn total(&self) -> u64 {
        self.values.iter().map(|&v| v as u64).sum()
    }

    /// Proportions `count / n`.
    pub fn proportions(&self, n: u32) -> RealField {
        let n = n as f64;
        self.map(|v| v as f64 / n)
    }
}

/// Plain (ASCII) PGM with maxval 255; gray level is `round(value * 255)`.
/// The top row of the image is the largest `y`.
pub fn write_pgm<W: Write>(field: &RealField, mut out: W) -> std::io::Result<()> {
    let w = field.window();
    writeln!(out, "P2")?;
    writeln!(out, "{} {}", w.width(), w.height())?;
    writeln!(out, "255")?;
    for y in (w.y_lo..=w.y_hi).rev() {
        let row: Vec<String> = (w.x_lo..=w.x_hi)
            .map(|x| ((field.get(x, y).clamp(0.0, 1.0) * 255.0).round() as u8).to_string())
            .collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

/// What a trajectory keeps in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordPolicy {
    /// Only the last slice.
    Final,
    /// Every slice, including time 0.
    All,
    /// The listed times (plus the final slice).
    Times(Vec<usize>),
    /// The last `k` slices: the band just behind the frontier.
    Trailing(usize),
}

impl Default for RecordPolicy {
    fn default() -> Self {
        RecordPolicy::Trailing(8)
    }
}

impl RecordPolicy {
    pub(crate) fn keeps(&self, t: usize) -> bool {
        match self {
            RecordPolicy::All => true,
            RecordPolicy::Times(ts) => ts.contains(&t),
            _ => false,
        }
    }

    /// Number of trailing slices kept, if bounded.
    pub(crate) fn trailing(&self) -> usize {
        match self {
            RecordPolicy::Final | RecordPolicy::Times(_) => 1,
            RecordPolicy::Trailing(k) => (*k).max(1),
            RecordPolicy::All => usize::MAX,
        }
    }
}

/// Keeps recorded slices according to a [`RecordPolicy`].
#[derive(Debug, Clone)]
pub(crate) struct SliceRecorder<S> {
    policy: RecordPolicy,
    kept: Vec<(usize, S)>,
    trailing: std::collections::VecDeque<(usize, S)>,
}

impl<S: Clone> SliceRecorder<S> {
    pub(crate) fn new(policy: RecordPolicy) -> Self {
        Self { policy, kept: Vec::new(), trailing: Default::default() }
    }

    pub(crate) fn push(&mut self, t: usize, slice: &S) {
        if self.policy == RecordPolicy::All {
            self.kept.push((t, slice.clone()));
            return;
        }
        if self.policy.keeps(t) {
            self.kept.push((t, slice.clone()));
        }
        self.trailing.push_back((t, slice.clone()));
        while self.trailing.len() > self.policy.trailing() {
            self.trailing.pop_front();
        }
    }

    /// Recorded `(time, slice)` pairs in increasing time.
    pub(crate) fn finish(self) -> Vec<(usize, S)> {
        let mut out = self.kept;
        for (t, s) in self.trailing {
            if out.last().is_none_or(|(last, _)| *last < t) {
                out.push((t, s));
            }
        }
        out
    }
}
