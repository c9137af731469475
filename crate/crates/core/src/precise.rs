//! Double-double evaluation of periodization images.
//!
//! On the torus an image `X2 + k` with `|k| ~ 40` carries phases of order
//! `10^3` rad; in plain `f64` each term then loses ~1e-13 rad, which the
//! cancelling image sum amplifies. Here the phase is accumulated in turns
//! (`1/(2πħ) = N` is exact) and reduced mod 1 before rounding to `f64`.
//! All phase inputs are algebraic in `M`, `C` and the labels, so no
//! transcendental function is evaluated in extended precision.

use std::f64::consts::TAU;

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::phase_space::{Mat2, PhasePoint};

type D = TwoFloat;

fn d(x: f64) -> D {
    TwoFloat::from(x)
}

/// `1/x` to double-double accuracy by one Newton step on the `f64` reciprocal.
/// (`TwoFloat` division forms its residual without FMA and stays at `f64` accuracy.)
fn recip(x: D) -> D {
    let r0 = 1.0 / x.hi();
    let e = d(1.0) - x * r0;
    d(r0) + e * r0
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct V2 {
    p: D,
    q: D,
}

impl V2 {
    fn from(x: PhasePoint) -> Self {
        V2 { p: d(x.p), q: d(x.q) }
    }

    /// `x + k` for integer `k`, exact.
    pub(crate) fn shifted(x: PhasePoint, k: [i64; 2]) -> Self {
        V2 {
            p: TwoFloat::new_add(x.p, k[0] as f64),
            q: TwoFloat::new_add(x.q, k[1] as f64),
        }
    }

    fn add(self, o: V2) -> V2 {
        V2 { p: self.p + o.p, q: self.q + o.q }
    }

    fn sub(self, o: V2) -> V2 {
        V2 { p: self.p - o.p, q: self.q - o.q }
    }

    fn half(self) -> V2 {
        V2 { p: self.p * 0.5, q: self.q * 0.5 }
    }

    fn wedge(self, o: V2) -> D {
        self.p * o.q - self.q * o.p
    }

    fn norm_sqr(self) -> D {
        self.p * self.p + self.q * self.q
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct M2 {
    a: [[D; 2]; 2],
}

impl M2 {
    fn from(m: &Mat2) -> Self {
        M2 {
            a: [[d(m.m[0][0]), d(m.m[0][1])], [d(m.m[1][0]), d(m.m[1][1])]],
        }
    }

    fn identity() -> Self {
        M2::from(&Mat2::identity())
    }

    fn add(&self, o: &M2) -> M2 {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.a[i][j] = self.a[i][j] + o.a[i][j];
            }
        }
        r
    }

    fn sub(&self, o: &M2) -> M2 {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.a[i][j] = self.a[i][j] - o.a[i][j];
            }
        }
        r
    }

    fn scale(&self, s: D) -> M2 {
        let mut r = *self;
        for row in r.a.iter_mut() {
            for x in row.iter_mut() {
                *x = *x * s;
            }
        }
        r
    }

    fn mul(&self, o: &M2) -> M2 {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.a[i][j] = self.a[i][0] * o.a[0][j] + self.a[i][1] * o.a[1][j];
            }
        }
        r
    }

    fn apply(&self, v: V2) -> V2 {
        V2 {
            p: self.a[0][0] * v.p + self.a[0][1] * v.q,
            q: self.a[1][0] * v.p + self.a[1][1] * v.q,
        }
    }

    fn det(&self) -> D {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }

    fn transpose(&self) -> M2 {
        M2 {
            a: [[self.a[0][0], self.a[1][0]], [self.a[0][1], self.a[1][1]]],
        }
    }

    fn inverse(&self) -> Option<M2> {
        let det = self.det();
        if det.hi() == 0.0 {
            return None;
        }
        let adj = M2 {
            a: [[self.a[1][1], -self.a[0][1]], [-self.a[1][0], self.a[0][0]]],
        };
        Some(adj.scale(recip(det)))
    }

    fn symmetrize(&self) -> M2 {
        let o = (self.a[0][1] + self.a[1][0]) * 0.5;
        M2 {
            a: [[self.a[0][0], o], [o, self.a[1][1]]],
        }
    }

    fn congruence(&self, t: &M2) -> M2 {
        t.transpose().mul(self).mul(t).symmetrize()
    }

    fn quad(&self, v: V2) -> D {
        self.a[0][0] * v.p * v.p + (self.a[0][1] + self.a[1][0]) * v.p * v.q + self.a[1][1] * v.q * v.q
    }
}

/// Extended-precision matrices of one step: `M`, `(M+1)⁻¹`, `B`, and the
/// complex-center family `Cbar`, `Bbar`, `D`, `E` built from `V/det V`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PreciseStep {
    m: M2,
    p1_inv: M2,
    m1_inv: Option<M2>,
    b: M2,
    cbar: M2,
    bbar: M2,
    dm: M2,
    em: M2,
}

impl PreciseStep {
    pub(crate) fn new(m: &Mat2, c: &Mat2) -> Result<Self> {
        let one = M2::identity();
        let mm = M2::from(m);
        let p1 = mm.add(&one);
        let p1_inv = p1.inverse().ok_or(Error::Caustic { det: 0.0 })?;
        let jt = M2::from(&Mat2::j().transpose());
        let b = jt.mul(&one.sub(&mm)).mul(&p1_inv).symmetrize();
        let cc = M2::from(c);
        // det(C - iB) = r + i s
        let r = cc.det() - b.det();
        let s = -(cc.a[0][0] * b.a[1][1] + cc.a[1][1] * b.a[0][0] - (cc.a[0][1] * b.a[1][0] + cc.a[1][0] * b.a[0][1]));
        let m2 = r * r + s * s;
        if m2.hi() == 0.0 {
            return Err(Error::SingularV);
        }
        let inv = recip(m2);
        let cbar = cc.scale(r).sub(&b.scale(s)).scale(inv);
        let bbar = b.scale(r).add(&cc.scale(s)).scale(inv);
        Ok(PreciseStep {
            m: mm,
            p1_inv,
            m1_inv: mm.sub(&one).inverse(),
            b,
            cbar,
            bbar,
            dm: bbar.congruence(&p1_inv),
            em: cbar.congruence(&p1_inv),
        })
    }
}

/// Real part of the exponent (`-damping/ħ` measured in units of `1/ħ`)
/// and the action `Φ` whose phase is `Φ/ħ`.
pub(crate) struct Exponent {
    pub(crate) damping: D,
    pub(crate) action: D,
}

fn center_chord(st: &PreciseStep, x: V2) -> V2 {
    let xm = st.p1_inv.apply(x.add(x));
    st.m.apply(xm).sub(xm)
}

pub(crate) fn overlap(x1: V2, y: V2) -> Exponent {
    Exponent {
        damping: x1.sub(y).norm_sqr() * 0.25,
        action: -(x1.wedge(y) * 0.5),
    }
}

pub(crate) fn sc1(st: &PreciseStep, x1: V2, y: V2) -> Exponent {
    let x = x1.add(y).half();
    let v = center_chord(st, x).sub(x1.sub(y));
    Exponent {
        damping: v.norm_sqr() * 0.25,
        action: st.b.quad(x) - x1.wedge(y) * 0.5,
    }
}

pub(crate) fn sc2(st: &PreciseStep, x1: V2, y: V2) -> Result<Exponent> {
    let inv = st.m1_inv.ok_or(Error::ShortTimeDivergence { det: 0.0 })?;
    let x = x1.add(y).half();
    let xi0 = x1.sub(y);
    let x0 = inv.apply(xi0).add(xi0.half());
    Ok(Exponent {
        damping: x0.sub(x).norm_sqr(),
        action: st.b.quad(x0) - xi0.wedge(x0) + x1.wedge(y) * 0.5,
    })
}

pub(crate) fn sc3(st: &PreciseStep, x1: V2, y: V2) -> Exponent {
    let x = x1.add(y).half();
    let delta = center_chord(st, x).sub(x1.sub(y)).half();
    Exponent {
        damping: st.cbar.quad(delta),
        action: st.b.quad(x) + st.bbar.quad(delta) - x1.wedge(y) * 0.5,
    }
}

pub(crate) fn sc3lin(st: &PreciseStep, x1: V2, y: V2) -> Exponent {
    let x = x1.add(y).half();
    let xi0 = x1.sub(y);
    let x2f = st.m.apply(y);
    let xi2 = x2f.sub(y);
    let dr = x2f.sub(x1);
    let quarter_b = st.b.scale(d(0.25));
    Exponent {
        damping: st.em.quad(dr),
        action: st.b.quad(y.add(xi2.half())) + xi2.add(x).wedge(xi0) * 0.5 + quarter_b.add(&st.dm).quad(dr),
    }
}

/// `sign · pref · e^{-damping/ħ} · exp(i[Φ/ħ - X2∧k/(2ħ)] + i·extra)` with `ħ = 1/(2πN)`.
pub(crate) fn torus_term(e: &Exponent, x2: PhasePoint, k: [i64; 2], n: usize, pref: f64, extra: f64) -> Complex64 {
    let nd = n as f64;
    let kk = V2 {
        p: d(k[0] as f64),
        q: d(k[1] as f64),
    };
    let turns = (e.action - V2::from(x2).wedge(kk) * 0.5) * nd;
    let frac = turns - turns.round();
    let sign = if (n as i64 * k[0] * k[1]).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let re = -(e.damping.hi() * TAU * nd);
    Complex64::from_polar(sign * pref * re.exp(), TAU * frac.hi() + extra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::matrix_set_general;

    #[test]
    fn matches_f64_matrix_set() {
        let m = Mat2::new(7.0, 12.0, 4.0, 7.0);
        let c = Mat2::new(1.2, 0.3, 0.3, 0.9);
        let c = c.scale(1.0 / c.det().sqrt());
        let fs = matrix_set_general(&m, &c).unwrap();
        let st = PreciseStep::new(&m, &c).unwrap();
        let f = |x: &M2| Mat2::new(x.a[0][0].hi(), x.a[0][1].hi(), x.a[1][0].hi(), x.a[1][1].hi());
        assert!(f(&st.b).max_abs_diff(&fs.b) < 1e-14);
        assert!(f(&st.cbar).max_abs_diff(&fs.cbar) < 1e-14);
        assert!(f(&st.bbar).max_abs_diff(&fs.bbar) < 1e-14);
        assert!(f(&st.dm).max_abs_diff(&fs.d) < 1e-14);
        assert!(f(&st.em).max_abs_diff(&fs.e) < 1e-14);
    }

    #[test]
    fn reciprocal_is_double_double() {
        let r = recip(d(54.0)) * 27.0 - 0.5;
        assert!(r.hi().abs() < 1e-31);
        let x = TwoFloat::new_add(3.0, 1e-17);
        assert!((recip(x) * x - 1.0).hi().abs() < 1e-31);
    }

    #[test]
    fn shifted_is_exact() {
        let v = V2::shifted(PhasePoint::new(0.1, 0.7), [-40, 33]);
        assert_eq!((v.p - d(-40.0)).hi(), 0.1);
        assert_eq!((v.q - d(33.0)).hi(), 0.7);
    }
}
