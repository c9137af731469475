//! Symplectic geometry in one degree of freedom and the matrix families built
//! from a monodromy matrix.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this, `|det(M+1)|` is treated as a caustic.
pub const CAUSTIC_TOL: f64 = 1e-12;

/// A point (or chord) of the phase plane, ordered `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub p: f64,
    pub q: f64,
}

impl PhasePoint {
    pub const ZERO: PhasePoint = PhasePoint { p: 0.0, q: 0.0 };

    pub const fn new(p: f64, q: f64) -> Self {
        PhasePoint { p, q }
    }

    pub fn dot(self, o: PhasePoint) -> f64 {
        self.p * o.p + self.q * o.q
    }

    /// `self ∧ o = p q' - q p'`.
    pub fn wedge(self, o: PhasePoint) -> f64 {
        self.p * o.q - self.q * o.p
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.p.is_finite() && self.q.is_finite()
    }

    /// Componentwise reduction into `[0,1)²`.
    pub fn mod1(self) -> Self {
        PhasePoint::new(frac(self.p), frac(self.q))
    }

    pub fn in_unit_square(self) -> bool {
        (0.0..1.0).contains(&self.p) && (0.0..1.0).contains(&self.q)
    }
}

/// `x - floor(x)`, mapping a rounding result of exactly 1.0 back to 0.0.
pub(crate) fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Wedge product as a free function.
pub fn wedge(a: PhasePoint, b: PhasePoint) -> f64 {
    a.wedge(b)
}

impl Add for PhasePoint {
    type Output = PhasePoint;
    fn add(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.p + o.p, self.q + o.q)
    }
}

impl Sub for PhasePoint {
    type Output = PhasePoint;
    fn sub(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.p - o.p, self.q - o.q)
    }
}

impl Neg for PhasePoint {
    type Output = PhasePoint;
    fn neg(self) -> PhasePoint {
        PhasePoint::new(-self.p, -self.q)
    }
}

impl Mul<f64> for PhasePoint {
    type Output = PhasePoint;
    fn mul(self, s: f64) -> PhasePoint {
        PhasePoint::new(self.p * s, self.q * s)
    }
}

impl Mul<PhasePoint> for f64 {
    type Output = PhasePoint;
    fn mul(self, x: PhasePoint) -> PhasePoint {
        x * self
    }
}

impl Div<f64> for PhasePoint {
    type Output = PhasePoint;
    fn div(self, s: f64) -> PhasePoint {
        PhasePoint::new(self.p / s, self.q / s)
    }
}

/// Real 2×2 matrix acting on column vectors `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

/// Monodromy matrices are plain [`Mat2`] values with unit determinant.
pub type SymplecticMap2 = Mat2;

impl Mat2 {
    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2 {
            m: [[m11, m12], [m21, m22]],
        }
    }

    pub const fn identity() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    pub const fn zero() -> Self {
        Mat2::new(0.0, 0.0, 0.0, 0.0)
    }

    /// The symplectic matrix `[[0,-1],[1,0]]`.
    pub const fn j() -> Self {
        Mat2::new(0.0, -1.0, 1.0, 0.0)
    }

    /// `[[0,1],[1,0]]`.
    pub const fn j_tilde() -> Self {
        Mat2::new(0.0, 1.0, 1.0, 0.0)
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        Mat2::new(a, 0.0, 0.0, b)
    }

    pub fn from_cols(c1: PhasePoint, c2: PhasePoint) -> Self {
        Mat2::new(c1.p, c2.p, c1.q, c2.q)
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    /// Checked constructor for a symplectic (unit determinant) matrix.
    pub fn symplectic(m11: f64, m12: f64, m21: f64, m22: f64) -> Result<Self> {
        let m = Mat2::new(m11, m12, m21, m22);
        if !m.is_finite() || (m.det() - 1.0).abs() >= 1e-12 {
            return Err(Error::InvalidInput(format!(
                "matrix is not symplectic: det = {}",
                m.det()
            )));
        }
        Ok(m)
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn adjugate(&self) -> Self {
        Mat2::new(self.m[1][1], -self.m[0][1], -self.m[1][0], self.m[0][0])
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(self.adjugate().scale(1.0 / d))
    }

    pub fn scale(&self, s: f64) -> Self {
        let m = &self.m;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn symmetrize(&self) -> Self {
        (*self + self.transpose()).scale(0.5)
    }

    /// Quadratic form `x·A x`.
    pub fn quad(&self, x: PhasePoint) -> f64 {
        x.dot(*self * x)
    }

    /// Bilinear form `x·A y`.
    pub fn bilinear(&self, x: PhasePoint, y: PhasePoint) -> f64 {
        x.dot(*self * y)
    }

    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..2 {
            for k in 0..2 {
                e = e.max((self.m[i][k] - o.m[i][k]).abs());
            }
        }
        e
    }

    pub fn asymmetry(&self) -> f64 {
        (self.m[0][1] - self.m[1][0]).abs()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    pub fn powi(&self, t: u32) -> Self {
        let mut r = Mat2::identity();
        for _ in 0..t {
            r = r * *self;
        }
        r
    }

    /// Congruence `Tᵀ A T`, the transformation law of a quadratic form.
    pub fn congruence(&self, t: &Mat2) -> Self {
        t.transpose() * *self * *t
    }

    /// Similarity `T⁻¹ A T`, the transformation law of a linear map.
    pub fn similarity(&self, t: &Mat2) -> Option<Self> {
        Some(t.inverse()? * *self * *t)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.m, o.m);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.m, o.m);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<PhasePoint> for Mat2 {
    type Output = PhasePoint;
    fn mul(self, x: PhasePoint) -> PhasePoint {
        PhasePoint::new(
            self.m[0][0] * x.p + self.m[0][1] * x.q,
            self.m[1][0] * x.p + self.m[1][1] * x.q,
        )
    }
}

/// Complex 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat2 {
    pub m: [[Complex64; 2]; 2],
}

impl CMat2 {
    /// `re + i·im`.
    pub fn from_parts(re: &Mat2, im: &Mat2) -> Self {
        let c = |i: usize, k: usize| Complex64::new(re.m[i][k], im.m[i][k]);
        CMat2 {
            m: [[c(0, 0), c(0, 1)], [c(1, 0), c(1, 1)]],
        }
    }

    pub fn re(&self) -> Mat2 {
        let m = &self.m;
        Mat2::new(m[0][0].re, m[0][1].re, m[1][0].re, m[1][1].re)
    }

    pub fn im(&self) -> Mat2 {
        let m = &self.m;
        Mat2::new(m[0][0].im, m[0][1].im, m[1][0].im, m[1][1].im)
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        let m = &self.m;
        Some(CMat2 {
            m: [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]],
        })
    }

    pub fn mul(&self, o: &CMat2) -> CMat2 {
        let (a, b) = (&self.m, &o.m);
        let e = |i: usize, k: usize| a[i][0] * b[0][k] + a[i][1] * b[1][k];
        CMat2 {
            m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    pub fn from_real(a: &Mat2) -> Self {
        CMat2::from_parts(a, &Mat2::zero())
    }

    pub fn max_abs_diff(&self, o: &CMat2) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..2 {
            for k in 0..2 {
                e = e.max((self.m[i][k] - o.m[i][k]).norm());
            }
        }
        e
    }

    pub fn scale(&self, s: Complex64) -> CMat2 {
        let m = &self.m;
        CMat2 {
            m: [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]],
        }
    }
}

/// Unstable/stable eigendirections of a hyperbolic map, normalized so that
/// `zeta_u ∧ zeta_s = 1`, with Lyapunov exponent `lambda` per step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicFrame {
    pub zeta_u: PhasePoint,
    pub zeta_s: PhasePoint,
    pub lambda: f64,
}

impl HyperbolicFrame {
    pub fn new(zeta_u: PhasePoint, zeta_s: PhasePoint, lambda: f64) -> Result<Self> {
        if (zeta_u.wedge(zeta_s) - 1.0).abs() >= 1e-12 {
            return Err(Error::InvalidInput(format!(
                "frame not normalized: zeta_u ∧ zeta_s = {}",
                zeta_u.wedge(zeta_s)
            )));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidInput("non-finite Lyapunov exponent".into()));
        }
        Ok(HyperbolicFrame {
            zeta_u,
            zeta_s,
            lambda,
        })
    }

    /// Frame of the map `[[2,3],[1,2]]`.
    pub fn cat() -> Self {
        let s3 = 3f64.sqrt();
        HyperbolicFrame {
            zeta_u: PhasePoint::new(1.0, 1.0 / s3),
            zeta_s: PhasePoint::new(-s3 / 2.0, 0.5),
            lambda: (2.0 + s3).ln(),
        }
    }

    /// Eigenframe of a hyperbolic map with trace > 2: `zeta_s` is the unit
    /// stable eigenvector with `q ≥ 0`, `zeta_u` is scaled to unit wedge.
    pub fn from_map(m: &Mat2) -> Result<Self> {
        let tr = m.trace();
        if !(tr > 2.0) || (m.det() - 1.0).abs() >= 1e-12 {
            return Err(Error::InvalidInput(format!(
                "map is not hyperbolic with positive trace (trace = {tr})"
            )));
        }
        let lambda = (tr / 2.0).acosh();
        let eig = |mu: f64| {
            // null vector of M - mu, from whichever row is better conditioned
            let r0 = PhasePoint::new(m.m[0][0] - mu, m.m[0][1]);
            let r1 = PhasePoint::new(m.m[1][0], m.m[1][1] - mu);
            let r = if r0.norm() >= r1.norm() { r0 } else { r1 };
            PhasePoint::new(-r.q, r.p)
        };
        let mut zs = eig((-lambda).exp());
        zs = zs / zs.norm();
        if zs.q < 0.0 || (zs.q == 0.0 && zs.p < 0.0) {
            zs = -zs;
        }
        let zu = eig(lambda.exp());
        let zu = zu / zu.wedge(zs);
        HyperbolicFrame::new(zu, zs, lambda)
    }

    /// Column matrix `T = [zeta_u | zeta_s]` (symplectic).
    pub fn basis(&self) -> Mat2 {
        Mat2::from_cols(self.zeta_u, self.zeta_s)
    }
}

/// Metric of the frame: Gram matrix of `(zeta_u, zeta_s)`.
pub fn metric_of(frame: &HyperbolicFrame) -> Mat2 {
    let (u, s) = (frame.zeta_u, frame.zeta_s);
    let a = u.dot(s);
    Mat2::new(u.norm_sqr(), a, a, s.norm_sqr())
}

/// Cayley matrix `B` with `J B = (1 - M)(1 + M)⁻¹`.
pub fn cayley_of(m: &Mat2) -> Result<Mat2> {
    let one = Mat2::identity();
    let p = one + *m;
    let d = p.det();
    if !(d.abs() >= CAUSTIC_TOL) {
        return Err(Error::Caustic { det: d.abs() });
    }
    let k = (one - *m) * p.adjugate().scale(1.0 / d);
    Ok((Mat2::j().transpose() * k).symmetrize())
}

/// `det[C(M+1) + iJ(1-M)] = det V · det(M+1)`, finite also at caustics.
pub fn det_w(m: &Mat2, c: &Mat2) -> Complex64 {
    let one = Mat2::identity();
    let re = *c * (*m + one);
    let im = Mat2::j() * (one - *m);
    CMat2::from_parts(&re, &im).det()
}

/// Matrices attached to a monodromy `M` and a metric `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameMatrixSet {
    pub c: Mat2,
    pub b: Mat2,
    pub v: CMat2,
    pub det_v_mod: f64,
    pub epsilon: f64,
    pub cbar: Mat2,
    pub bbar: Mat2,
    pub d: Mat2,
    pub e: Mat2,
    pub det_m1: f64,
}

impl FrameMatrixSet {
    pub fn det_v(&self) -> Complex64 {
        Complex64::from_polar(self.det_v_mod, self.epsilon)
    }

    /// `|det[V(M+1)]|`.
    pub fn det_w_mod(&self) -> f64 {
        self.det_v_mod * self.det_m1
    }

    /// `Ṽ = Cbar - i·Bbar`.
    pub fn v_tilde(&self) -> CMat2 {
        CMat2::from_parts(&self.cbar, &self.bbar.scale(-1.0))
    }

    /// Re-express every quadratic form in new coordinates `x_old = T x_new`.
    pub fn congruence(&self, t: &Mat2) -> FrameMatrixSet {
        let c = self.c.congruence(t);
        let b = self.b.congruence(t);
        FrameMatrixSet {
            c,
            b,
            v: CMat2::from_parts(&c, &b.scale(-1.0)),
            cbar: self.cbar.congruence(t),
            bbar: self.bbar.congruence(t),
            d: self.d.congruence(t),
            e: self.e.congruence(t),
            ..*self
        }
    }

    /// Largest entrywise deviation over all members.
    pub fn max_abs_diff(&self, o: &FrameMatrixSet) -> f64 {
        [
            self.c.max_abs_diff(&o.c),
            self.b.max_abs_diff(&o.b),
            self.v.max_abs_diff(&o.v),
            (self.det_v_mod - o.det_v_mod).abs(),
            (self.epsilon - o.epsilon).abs(),
            self.cbar.max_abs_diff(&o.cbar),
            self.bbar.max_abs_diff(&o.bbar),
            self.d.max_abs_diff(&o.d),
            self.e.max_abs_diff(&o.e),
            (self.det_m1 - o.det_m1).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Builds the set from any symplectic `M` and metric `C`.
pub fn matrix_set_general(m: &Mat2, c: &Mat2) -> Result<FrameMatrixSet> {
    let b = cayley_of(m)?;
    let v = CMat2::from_parts(c, &b.scale(-1.0));
    let det_v = v.det();
    if !(det_v.norm() >= CAUSTIC_TOL) {
        return Err(Error::SingularV);
    }
    let vinv = v.inverse().ok_or(Error::SingularV)?;
    let jt = CMat2::from_real(&Mat2::j().transpose());
    let j = CMat2::from_real(&Mat2::j());
    let vt = jt.mul(&vinv).mul(&j);
    let cbar = vt.re().symmetrize();
    let bbar = vt.im().scale(-1.0).symmetrize();
    let p1 = *m + Mat2::identity();
    let pinv = p1.inverse().ok_or(Error::Caustic { det: 0.0 })?;
    Ok(FrameMatrixSet {
        c: *c,
        b,
        v,
        det_v_mod: det_v.norm(),
        epsilon: det_v.arg(),
        cbar,
        bbar,
        d: bbar.congruence(&pinv).symmetrize(),
        e: cbar.congruence(&pinv).symmetrize(),
        det_m1: p1.det().abs(),
    })
}

/// Closed forms in the `(zeta_u, zeta_s)` basis, where `M^t = diag(e^{λt}, e^{-λt})`.
pub fn hyperbolic_closed_forms(frame: &HyperbolicFrame, t: f64) -> FrameMatrixSet {
    let c = metric_of(frame);
    let (cu, a, cs) = (c.m[0][0], c.m[0][1], c.m[1][1]);
    let lt = frame.lambda * t;
    let th = (lt / 2.0).tanh();
    let ch = (lt / 2.0).cosh();
    let th2 = 1.0 + th * th;
    let det_v = Complex64::new(th2, 2.0 * a * th);
    let m = det_v.norm_sqr();
    let det1 = 4.0 * ch * ch * m;
    let (eu, es) = ((-lt).exp(), lt.exp());

    let b = Mat2::new(0.0, th, th, 0.0);
    let cbar = (c.scale(th2) - b.scale(2.0 * a * th)).scale(1.0 / m);
    let bbar = (b.scale(th2) + c.scale(2.0 * a * th)).scale(1.0 / m);
    let e12 = a / (ch * ch * det1);
    let e = Mat2::new(cu * th2 * eu / det1, e12, e12, cs * th2 * es / det1);
    let d12 = th * (th2 + 2.0 * a * a) / det1;
    let d = Mat2::new(
        2.0 * a * th * cu * eu / det1,
        d12,
        d12,
        2.0 * a * th * cs * es / det1,
    );
    FrameMatrixSet {
        c,
        b,
        v: CMat2::from_parts(&c, &b.scale(-1.0)),
        det_v_mod: det_v.norm(),
        epsilon: det_v.arg(),
        cbar,
        bbar,
        d,
        e,
        det_m1: 4.0 * ch * ch,
    }
}

/// Closed-form set expressed in Cartesian `(p, q)` coordinates.
pub fn matrix_set_hyperbolic(frame: &HyperbolicFrame, t: f64) -> FrameMatrixSet {
    let tinv = frame
        .basis()
        .inverse()
        .expect("frame basis has unit determinant");
    hyperbolic_closed_forms(frame, t).congruence(&tinv)
}
