//! Linear hyperbolic automorphisms of the 2-torus.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase_space::{cayley_of, HyperbolicFrame, Mat2, PhasePoint};

/// Integer-valued winding vector.
pub type Winding = [i64; 2];

fn to_point(m: Winding) -> PhasePoint {
    PhasePoint::new(m[0] as f64, m[1] as f64)
}

/// A hyperbolic cat map `x -> M x mod 1` with its Cayley matrix and eigenframe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatMap {
    pub m_int: [[i64; 2]; 2],
    pub m: Mat2,
    pub b: Mat2,
    pub lambda: f64,
    pub frame: HyperbolicFrame,
}

impl Default for CatMap {
    fn default() -> Self {
        CatMap::standard()
    }
}

impl CatMap {
    pub fn new(m_int: [[i64; 2]; 2]) -> Result<Self> {
        let det = m_int[0][0] as i128 * m_int[1][1] as i128 - m_int[0][1] as i128 * m_int[1][0] as i128;
        if det != 1 {
            return Err(Error::InvalidInput(format!("cat map must have det 1, got {det}")));
        }
        if m_int[0][0] as i128 + m_int[1][1] as i128 <= 2 {
            return Err(Error::InvalidInput("cat map must have trace > 2".into()));
        }
        let m = Mat2::new(
            m_int[0][0] as f64,
            m_int[0][1] as f64,
            m_int[1][0] as f64,
            m_int[1][1] as f64,
        );
        let frame = HyperbolicFrame::from_map(&m)?;
        Ok(CatMap {
            m_int,
            m,
            b: cayley_of(&m)?,
            lambda: frame.lambda,
            frame,
        })
    }

    /// `M = [[2,3],[1,2]]`, with the frame written in closed form.
    pub fn standard() -> Self {
        let mut c = CatMap::new([[2, 3], [1, 2]]).expect("standard cat map is valid");
        c.frame = HyperbolicFrame::cat();
        c.lambda = c.frame.lambda;
        c
    }

    /// The map `M^t`; the frame is shared and `lambda` scales with `t`.
    pub fn power(&self, t: u32) -> Result<CatMap> {
        if t == 0 {
            return Err(Error::InvalidInput("power requires t >= 1".into()));
        }
        let mut r: [[i64; 2]; 2] = [[1, 0], [0, 1]];
        for _ in 0..t {
            r = int_mul(&r, &self.m_int).ok_or(Error::Overflow(t))?;
        }
        let m = Mat2::new(r[0][0] as f64, r[0][1] as f64, r[1][0] as f64, r[1][1] as f64);
        let lambda = self.lambda * t as f64;
        Ok(CatMap {
            m_int: r,
            m,
            b: cayley_of(&m)?,
            lambda,
            frame: HyperbolicFrame { lambda, ..self.frame },
        })
    }

    /// One application: `x_plus = M x - m` with `x_plus ∈ [0,1)²`.
    pub fn step(&self, x: PhasePoint) -> OrbitSegment {
        let y = self.m * x;
        let m = [y.p.floor() as i64, y.q.floor() as i64];
        let x_plus = (y - to_point(m)).mod1();
        self.segment(x, x_plus, m, 1)
    }

    /// Center generating function `S(x, m)` of this map.
    pub fn center_action(&self, x: PhasePoint, m: Winding) -> f64 {
        center_action(&self.b, x, m)
    }

    /// Composes `t` steps from `x_start`, accumulating the total winding.
    pub fn orbit_through(&self, x_start: PhasePoint, t: u32) -> Result<OrbitSegment> {
        let mut x = x_start;
        let mut mt: Winding = [0, 0];
        for _ in 0..t {
            let s = self.step(x);
            let mm = int_mul_vec(&self.m_int, mt).ok_or(Error::Overflow(t))?;
            mt = [mm[0] + s.m[0], mm[1] + s.m[1]];
            x = s.x_plus;
        }
        if t == 0 {
            return Ok(OrbitSegment::trivial(x_start));
        }
        let pw = self.power(t)?;
        Ok(pw.segment(x_start, x, mt, t))
    }

    /// Orbit of `M^t` with center `X` and winding `m`: `(M^t + 1) x_minus = 2X + m`.
    pub fn orbit_with_center(&self, x: PhasePoint, m: Winding, t: u32) -> Result<OrbitSegment> {
        let pw = self.power(t)?;
        let inv = (pw.m + Mat2::identity())
            .inverse()
            .ok_or(Error::Caustic { det: 0.0 })?;
        let x_minus = inv * (x * 2.0 + to_point(m));
        let x_plus = pw.m * x_minus - to_point(m);
        Ok(pw.segment(x_minus, x_plus, m, t))
    }

    /// Orbit of `M^t` with chord `xi0` and winding `m`: `(M^t - 1) x_minus = xi0 + m`.
    pub fn orbit_with_chord(&self, xi0: PhasePoint, m: Winding, t: u32) -> Result<OrbitSegment> {
        let pw = self.power(t)?;
        let a = pw.m - Mat2::identity();
        let inv = a.inverse().ok_or(Error::ShortTimeDivergence { det: a.det().abs() })?;
        let x_minus = inv * (xi0 + to_point(m));
        let x_plus = pw.m * x_minus - to_point(m);
        Ok(pw.segment(x_minus, x_plus, m, t))
    }

    /// Chord action `S(x0) - xi0 ∧ x0` on the orbit with chord `xi0`.
    pub fn chord_action(&self, xi0: PhasePoint, m: Winding, t: u32) -> Result<f64> {
        let seg = self.orbit_with_chord(xi0, m, t)?;
        Ok(seg.action - xi0.wedge(seg.center))
    }

    fn segment(&self, x_minus: PhasePoint, x_plus: PhasePoint, m: Winding, t: u32) -> OrbitSegment {
        let center = (x_plus + x_minus) * 0.5;
        OrbitSegment {
            x_minus,
            x_plus,
            m,
            t,
            center,
            chord: x_plus - x_minus,
            action: self.center_action(center, m),
        }
    }
}

/// `S = x·Bx + x·(B - J)m + ¼ m·(B + J̃)m`.
pub fn center_action(b: &Mat2, x: PhasePoint, m: Winding) -> f64 {
    let mv = to_point(m);
    b.quad(x) + (*b - Mat2::j()).bilinear(x, mv) + 0.25 * (*b + Mat2::j_tilde()).quad(mv)
}

fn int_mul(a: &[[i64; 2]; 2], b: &[[i64; 2]; 2]) -> Option<[[i64; 2]; 2]> {
    let e = |i: usize, k: usize| {
        a[i][0]
            .checked_mul(b[0][k])?
            .checked_add(a[i][1].checked_mul(b[1][k])?)
    };
    Some([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]])
}

fn int_mul_vec(a: &[[i64; 2]; 2], v: Winding) -> Option<Winding> {
    let e = |i: usize| a[i][0].checked_mul(v[0])?.checked_add(a[i][1].checked_mul(v[1])?);
    Some([e(0)?, e(1)?])
}

/// A trajectory segment of `t` steps with its winding and center action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitSegment {
    pub x_minus: PhasePoint,
    pub x_plus: PhasePoint,
    pub m: Winding,
    pub t: u32,
    pub center: PhasePoint,
    pub chord: PhasePoint,
    pub action: f64,
}

impl OrbitSegment {
    fn trivial(x: PhasePoint) -> Self {
        OrbitSegment {
            x_minus: x,
            x_plus: x,
            m: [0, 0],
            t: 0,
            center: x,
            chord: PhasePoint::ZERO,
            action: 0.0,
        }
    }
}
