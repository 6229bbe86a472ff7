//! Uniform tensor grids and value tables with an exterior-data rule.
//!
//! Tables store every node of a box (interior unknowns plus frozen
//! exterior data samples); queries outside the box fall through to a
//! user-supplied exterior closure. Periodic axes wrap instead.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    /// Finite extent; beyond the box the exterior rule applies.
    Bounded,
    /// Wraps with period n*h (the upper bound is excluded).
    Periodic,
}

/// Uniform grid: node i on axis k sits at lo[k] + i*h[k].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub h: Vec<f64>,
    pub n: Vec<usize>,
    pub axis: Vec<AxisKind>,
}

impl GridSpec {
    /// Bounded box [lo, hi] with spacing h on every axis (hi snapped to
    /// the nearest node).
    pub fn bounded(lo: Vec<f64>, hi: Vec<f64>, h: f64) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || !(h > 0.0) {
            return Err(Error::ParameterViolation(format!(
                "grid needs matching non-empty bounds and positive spacing (h={h})"
            )));
        }
        let dim = lo.len();
        let mut n = vec![0usize; dim];
        for k in 0..dim {
            if hi[k] <= lo[k] {
                return Err(Error::ParameterViolation(format!(
                    "grid axis {k} has hi <= lo ({} <= {})",
                    hi[k], lo[k]
                )));
            }
            n[k] = ((hi[k] - lo[k]) / h).round() as usize + 1;
            if n[k] < 2 {
                n[k] = 2;
            }
        }
        Ok(GridSpec {
            lo,
            h: vec![h; dim],
            n,
            axis: vec![AxisKind::Bounded; dim],
        })
    }

    /// Mark one axis periodic with period n*h starting at lo.
    pub fn with_periodic_axis(mut self, k: usize, period: f64) -> Result<Self> {
        if k >= self.lo.len() || !(period > 0.0) {
            return Err(Error::ParameterViolation(format!(
                "bad periodic axis {k} or period {period}"
            )));
        }
        let cells = (period / self.h[k]).round().max(1.0) as usize;
        // keep the requested spacing exactly consistent with the period
        self.h[k] = period / cells as f64;
        self.n[k] = cells;
        self.axis[k] = AxisKind::Periodic;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Upper corner (last node for bounded axes; exclusive for periodic).
    pub fn hi(&self, k: usize) -> f64 {
        match self.axis[k] {
            AxisKind::Bounded => self.lo[k] + self.h[k] * (self.n[k] - 1) as f64,
            AxisKind::Periodic => self.lo[k] + self.h[k] * self.n[k] as f64,
        }
    }

    #[inline]
    pub fn flat(&self, idx: &[usize]) -> usize {
        let mut f = 0usize;
        for k in 0..idx.len() {
            f = f * self.n[k] + idx[k];
        }
        f
    }

    #[inline]
    pub fn unflat(&self, mut f: usize, out: &mut [usize]) {
        for k in (0..self.n.len()).rev() {
            out[k] = f % self.n[k];
            f /= self.n[k];
        }
    }

    #[inline]
    pub fn point(&self, idx: &[usize], out: &mut [f64]) {
        for k in 0..idx.len() {
            out[k] = self.lo[k] + self.h[k] * idx[k] as f64;
        }
    }

    pub fn point_of_flat(&self, f: usize) -> Vec<f64> {
        let mut idx = vec![0usize; self.dim()];
        self.unflat(f, &mut idx);
        let mut x = vec![0.0; self.dim()];
        self.point(&idx, &mut x);
        x
    }
}

type ExteriorFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Grid of values + exterior rule + residual history.
#[derive(Clone)]
pub struct ValueTable {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    /// true where the solver may rewrite the value; false = frozen data.
    pub interior: Vec<bool>,
    pub exterior: ExteriorFn,
    /// Observation time ε the table was built for (0 when not applicable).
    pub eps: f64,
    /// Sup-norm change per sweep.
    pub residuals: Vec<f64>,
}

impl std::fmt::Debug for ValueTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ValueTable")
            .field("spec", &self.spec)
            .field("points", &self.values.len())
            .field("eps", &self.eps)
            .field("sweeps", &self.residuals.len())
            .finish()
    }
}

impl ValueTable {
    /// Build a table: interior predicate marks unknowns, every node is
    /// initialised from `init`, and off-box queries use `exterior`.
    pub fn build<I, P>(spec: GridSpec, interior_pred: P, init: I, exterior: ExteriorFn, eps: f64) -> Self
    where
        I: Fn(&[f64]) -> f64,
        P: Fn(&[f64]) -> bool,
    {
        let len = spec.len();
        let dim = spec.dim();
        let mut values = vec![0.0; len];
        let mut interior = vec![false; len];
        let mut idx = vec![0usize; dim];
        let mut x = vec![0.0; dim];
        for f in 0..len {
            spec.unflat(f, &mut idx);
            spec.point(&idx, &mut x);
            interior[f] = interior_pred(&x);
            values[f] = init(&x);
        }
        ValueTable {
            spec,
            values,
            interior,
            exterior,
            eps,
            residuals: Vec::new(),
        }
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.spec.flat(idx)]
    }

    /// Multilinear interpolation; outside the bounded box the exterior
    /// rule is used for the whole query point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let dim = self.spec.dim();
        debug_assert_eq!(x.len(), dim);
        // cell index + fraction per axis
        let mut base = [0usize; 8];
        let mut frac = [0.0f64; 8];
        debug_assert!(dim <= 8, "tables support up to 8 axes");
        for k in 0..dim {
            let h = self.spec.h[k];
            match self.spec.axis[k] {
                AxisKind::Bounded => {
                    let t = (x[k] - self.spec.lo[k]) / h;
                    let top = (self.spec.n[k] - 1) as f64;
                    if t < -1e-9 || t > top + 1e-9 {
                        return (self.exterior)(x);
                    }
                    let tc = t.clamp(0.0, top);
                    let mut c = tc.floor() as usize;
                    if c >= self.spec.n[k] - 1 {
                        c = self.spec.n[k] - 2;
                    }
                    base[k] = c;
                    frac[k] = (tc - c as f64).clamp(0.0, 1.0);
                }
                AxisKind::Periodic => {
                    let period = h * self.spec.n[k] as f64;
                    let mut t = (x[k] - self.spec.lo[k]) % period;
                    if t < 0.0 {
                        t += period;
                    }
                    let tc = t / h;
                    let c = (tc.floor() as usize).min(self.spec.n[k] - 1);
                    base[k] = c;
                    frac[k] = (tc - c as f64).clamp(0.0, 1.0);
                }
            }
        }
        // accumulate over the 2^dim cell corners
        let corners = 1usize << dim;
        let mut acc = 0.0;
        let mut idx = [0usize; 8];
        for c in 0..corners {
            let mut w = 1.0;
            for k in 0..dim {
                if c & (1 << k) != 0 {
                    w *= frac[k];
                    idx[k] = match self.spec.axis[k] {
                        AxisKind::Bounded => base[k] + 1,
                        AxisKind::Periodic => (base[k] + 1) % self.spec.n[k],
                    };
                } else {
                    w *= 1.0 - frac[k];
                    idx[k] = base[k];
                }
            }
            if w != 0.0 {
                acc += w * self.values[self.spec.flat(&idx[..dim])];
            }
        }
        acc
    }

    /// Largest |self - other| over nodes (grids must match).
    pub fn sup_diff(&self, other: &ValueTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
    }

    /// Iterate (flat index, point) over all nodes.
    pub fn points(&self) -> impl Iterator<Item = (usize, Vec<f64>)> + '_ {
        (0..self.spec.len()).map(move |f| (f, self.spec.point_of_flat(f)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext_zero() -> ExteriorFn {
        Arc::new(|_: &[f64]| 0.0)
    }

    #[test]
    fn interpolation_reproduces_linear_functions() {
        let spec = GridSpec::bounded(vec![0.0, 0.0], vec![1.0, 2.0], 0.25).unwrap();
        let t = ValueTable::build(
            spec,
            |_| true,
            |x| 3.0 * x[0] - 2.0 * x[1] + 0.5,
            ext_zero(),
            0.0,
        );
        for p in [[0.1, 0.3], [0.99, 1.37], [0.5, 2.0], [0.0, 0.0]] {
            let want = 3.0 * p[0] - 2.0 * p[1] + 0.5;
            assert!((t.eval(&p) - want).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn outside_box_uses_exterior_rule() {
        let spec = GridSpec::bounded(vec![0.0], vec![1.0], 0.5).unwrap();
        let t = ValueTable::build(
            spec,
            |_| true,
            |_| 5.0,
            Arc::new(|x: &[f64]| if x[0] > 1.0 { 9.0 } else { -9.0 }),
            0.0,
        );
        assert_eq!(t.eval(&[1.5]), 9.0);
        assert_eq!(t.eval(&[-0.5]), -9.0);
        assert_eq!(t.eval(&[0.5]), 5.0);
    }

    #[test]
    fn periodic_axis_wraps() {
        let spec = GridSpec::bounded(vec![0.0, 0.0], vec![1.0, 1.0], 0.25)
            .unwrap()
            .with_periodic_axis(1, 1.0)
            .unwrap();
        let t = ValueTable::build(
            spec,
            |_| true,
            |x| (2.0 * std::f64::consts::PI * x[1]).sin(),
            ext_zero(),
            0.0,
        );
        let a = t.eval(&[0.5, 0.3]);
        let b = t.eval(&[0.5, 1.3]);
        let c = t.eval(&[0.5, -0.7]);
        assert!((a - b).abs() < 1e-12);
        assert!((a - c).abs() < 1e-12);
    }

    #[test]
    fn flat_roundtrip() {
        let spec = GridSpec::bounded(vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0], 0.5).unwrap();
        let mut idx = vec![0usize; 3];
        for f in 0..spec.len() {
            spec.unflat(f, &mut idx);
            assert_eq!(spec.flat(&idx), f);
        }
    }
}
