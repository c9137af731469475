//! Quadratic Hamiltonian flows `H(x) = ½ x·𝓗x` in the plane.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::phase_space::{cayley_of, det_w, Mat2, PhasePoint};

/// `|det(M+1)|` below this at a local minimum counts as a caustic.
const CAUSTIC_MIN_TOL: f64 = 1e-8;
/// Caustic times are refined to this resolution.
const BISECT_TOL: f64 = 1e-12;

/// Hessian `h` of a quadratic Hamiltonian together with `hbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticHamiltonian {
    pub h: Mat2,
    pub hbar: f64,
}

impl QuadraticHamiltonian {
    pub fn new(h: Mat2, hbar: f64) -> Self {
        QuadraticHamiltonian {
            h: h.symmetrize(),
            hbar,
        }
    }

    /// `𝓗 = I`: unit frequency and mass.
    pub fn harmonic() -> Self {
        QuadraticHamiltonian::new(Mat2::identity(), 1.0)
    }

    /// `𝓗 = diag(1, -1)`.
    pub fn inverted() -> Self {
        QuadraticHamiltonian::new(Mat2::diag(1.0, -1.0), 1.0)
    }

    pub fn with_hbar(self, hbar: f64) -> Self {
        QuadraticHamiltonian { hbar, ..self }
    }

    /// Generator `A = J𝓗` of the linear flow.
    pub fn generator(&self) -> Mat2 {
        Mat2::j() * self.h
    }

    /// Classical energy.
    pub fn energy(&self, x: PhasePoint) -> f64 {
        0.5 * self.h.quad(x)
    }

    /// Angular frequency when the flow is elliptic.
    pub fn frequency(&self) -> Option<f64> {
        let k = self.generator().det();
        (k > 0.0).then(|| k.sqrt())
    }

    /// `exp(tJ𝓗)` in closed form. `A` is traceless, so `A² = -det(A)·1`.
    pub fn monodromy(&self, t: f64) -> Mat2 {
        let a = self.generator();
        let k = a.det();
        let one = Mat2::identity();
        if k > 0.0 {
            let w = k.sqrt();
            one.scale((w * t).cos()) + a.scale((w * t).sin() / w)
        } else if k < 0.0 {
            let g = (-k).sqrt();
            one.scale((g * t).cosh()) + a.scale((g * t).sinh() / g)
        } else {
            one + a.scale(t)
        }
    }

    /// Exact center action `x·B_t x`.
    pub fn center_action(&self, x: PhasePoint, t: f64) -> Result<f64> {
        Ok(cayley_of(&self.monodromy(t))?.quad(x))
    }

    /// A scan step satisfying the morse_track precondition for this flow.
    pub fn default_dt(&self) -> f64 {
        match self.frequency() {
            Some(w) => (std::f64::consts::PI / (8.0 * w)).min(0.05),
            None => 0.05,
        }
    }
}

/// Monodromy and caustic bookkeeping of a flow up to time `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowState {
    pub t: f64,
    pub m: Mat2,
    /// `None` when `t` itself is a caustic.
    pub b: Option<Mat2>,
    /// Morse index: each caustic contributes the nullity of `M + 1` there.
    pub alpha: i64,
    pub caustic_times: Vec<f64>,
    /// Continuous branch of `arg det[C(M+1) + iJ(1-M)]` with `C = 1`, zero at `t = 0`.
    pub arg_det_w: f64,
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn wrap(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let r = (a + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Scans `[0, t]` with step at most `dt`, locating caustics (zeros of
/// `det(M^s + 1)`) and unwrapping the phase of `det W`.
pub fn morse_track(h: &QuadraticHamiltonian, t: f64, dt: f64) -> FlowState {
    let a = h.generator();
    let f = |s: f64| h.monodromy(s).trace() + 2.0;
    let g = |s: f64| (a * h.monodromy(s)).trace();
    let one = Mat2::identity();
    let n = ((t.abs() / dt).ceil() as usize).max(1);
    let ds = t / n as f64;

    let mut caustics: Vec<f64> = Vec::new();
    let mut alpha = 0i64;
    let push = |s: f64, caustics: &mut Vec<f64>, alpha: &mut i64| {
        if caustics.last().is_some_and(|&c| (c - s).abs() < 1e-8) {
            return;
        }
        let p = h.monodromy(s) + one;
        let null = if p.max_abs_diff(&Mat2::zero()) < 1e-6 { 2 } else { 1 };
        caustics.push(s);
        *alpha += null;
    };

    let mut arg = 0.0;
    let mut prev_w: Complex64 = det_w(&one, &one);
    for k in 1..=n {
        let (s0, s1) = (ds * (k - 1) as f64, ds * k as f64);
        let (f0, f1) = (f(s0), f(s1));
        if f0 * f1 < 0.0 {
            push(bisect(s0, s1, f), &mut caustics, &mut alpha);
        } else {
            let (g0, g1) = (g(s0), g(s1));
            let (g0, g1) = if ds > 0.0 { (g0, g1) } else { (-g0, -g1) };
            if g0 < 0.0 && g1 >= 0.0 {
                let sc = bisect(s0, s1, g);
                if f(sc).abs() < CAUSTIC_MIN_TOL {
                    push(sc, &mut caustics, &mut alpha);
                }
            }
        }
        let w = det_w(&h.monodromy(s1), &one);
        arg += wrap(w.arg() - prev_w.arg());
        prev_w = w;
    }
    if f(t).abs() < CAUSTIC_MIN_TOL {
        push(t, &mut caustics, &mut alpha);
    }

    let m = h.monodromy(t);
    FlowState {
        t,
        m,
        b: cayley_of(&m).ok(),
        alpha,
        caustic_times: caustics,
        arg_det_w: arg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn monodromy_examples() {
        let ho = QuadraticHamiltonian::harmonic();
        assert!(ho.monodromy(2.0 * PI).max_abs_diff(&Mat2::identity()) < 1e-14);
        assert!(ho.monodromy(PI).max_abs_diff(&Mat2::identity().scale(-1.0)) < 1e-15);
        let io = QuadraticHamiltonian::inverted();
        let m = io.monodromy(1.0);
        let tr = m.trace();
        let disc = (tr * tr / 4.0 - 1.0).sqrt();
        assert!((tr / 2.0 + disc - 1f64.exp()).abs() < 1e-12);
        assert!((tr / 2.0 - disc - (-1f64).exp()).abs() < 1e-12);
        let shear = QuadraticHamiltonian::new(Mat2::diag(1.0, 0.0), 1.0);
        assert!((shear.monodromy(2.0).det() - 1.0).abs() < 1e-15);
    }

    fn rk4(h: &QuadraticHamiltonian, x: PhasePoint, t: f64, steps: usize) -> PhasePoint {
        let a = h.generator();
        let dt = t / steps as f64;
        let mut y = x;
        for _ in 0..steps {
            let k1 = a * y;
            let k2 = a * (y + k1 * (dt / 2.0));
            let k3 = a * (y + k2 * (dt / 2.0));
            let k4 = a * (y + k3 * dt);
            y = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        }
        y
    }

    #[test]
    fn action_chord_against_integration() {
        for h in [
            QuadraticHamiltonian::harmonic(),
            QuadraticHamiltonian::inverted(),
            QuadraticHamiltonian::new(Mat2::new(2.0, 0.3, 0.3, 0.7), 1.0),
        ] {
            let x = PhasePoint::new(0.4, -0.9);
            let t = 1.3;
            assert_eq!(h.center_action(PhasePoint::ZERO, t).unwrap(), 0.0);
            let m = h.monodromy(t);
            let b = cayley_of(&m).unwrap();
            let chord = -(Mat2::j() * (b * x * 2.0));
            let x_minus = (m + Mat2::identity()).inverse().unwrap() * (x * 2.0);
            let x_plus = rk4(&h, x_minus, t, 4000);
            assert!(((x_plus - x_minus) - chord).norm() < 1e-10);
            assert!(((x_plus + x_minus) * 0.5 - x).norm() < 1e-10);
        }
    }

    #[test]
    fn short_time_action() {
        let ho = QuadraticHamiltonian::harmonic();
        let x = PhasePoint::new(0.7, 0.2);
        for t in [1e-2, 1e-3] {
            let s = ho.center_action(x, t).unwrap();
            assert!((s + t * ho.energy(x)).abs() < t * t * t);
        }
    }

    #[test]
    fn caustic_action_errors() {
        let ho = QuadraticHamiltonian::harmonic();
        assert!(ho.center_action(PhasePoint::new(1.0, 0.0), PI).is_err());
    }

    #[test]
    fn morse_index_harmonic() {
        let ho = QuadraticHamiltonian::harmonic();
        let dt = ho.default_dt();
        assert_eq!(morse_track(&ho, 3.0, dt).alpha, 0);
        let s = morse_track(&ho, 4.0, dt);
        assert_eq!(s.caustic_times.len(), 1);
        assert!((s.caustic_times[0] - PI).abs() < 1e-10);
        assert_eq!(s.alpha, 2);
        let s = morse_track(&ho, 3.0 * PI + 0.5, dt);
        assert_eq!(s.caustic_times.len(), 2);
        assert!((s.caustic_times[1] - 3.0 * PI).abs() < 1e-10);
        // a caustic exactly at the end time is included
        let s = morse_track(&ho, PI, dt);
        assert_eq!(s.caustic_times.len(), 1);
        assert!(s.b.is_none());
        let mut last = 0;
        for k in 0..100 {
            let a = morse_track(&ho, k as f64 * 0.13, dt).alpha;
            assert!(a >= last);
            last = a;
        }
    }

    #[test]
    fn morse_index_inverted() {
        let io = QuadraticHamiltonian::inverted();
        for t in [0.5, 2.0, 5.0] {
            let s = morse_track(&io, t, io.default_dt());
            assert_eq!(s.alpha, 0);
            assert!(s.caustic_times.is_empty());
            assert!(s.arg_det_w.abs() < 1e-12);
        }
    }

    #[test]
    fn branch_tracks_harmonic_phase() {
        let ho = QuadraticHamiltonian::harmonic();
        for t in [0.3, 2.0, PI, 5.0, 7.5, 12.0] {
            let s = morse_track(&ho, t, ho.default_dt());
            assert!((s.arg_det_w - t).abs() < 1e-10, "t={t}");
        }
        let w = det_w(&ho.monodromy(PI), &Mat2::identity());
        assert!(w.norm() >= 1.0);
    }

    proptest! {
        #[test]
        fn unimodular_and_group(t in -6.0..6.0f64, s in -6.0..6.0f64, a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64) {
            let h = QuadraticHamiltonian::new(Mat2::new(a, b, b, c), 1.0);
            let mt = h.monodromy(t);
            prop_assert!((mt.det() - 1.0).abs() < 1e-12 * (1.0 + mt.max_abs_diff(&Mat2::zero())).powi(2));
            let lhs = h.monodromy(t + s);
            let ms = h.monodromy(s);
            let rhs = mt * ms;
            // cancellation in the product: scale by both factor norms
            let size = (1.0 + mt.max_abs_diff(&Mat2::zero())) * (1.0 + ms.max_abs_diff(&Mat2::zero()));
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12 * size);
        }
    }
}
