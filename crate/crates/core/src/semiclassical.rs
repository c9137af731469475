//! Semiclassical coherent-state matrix elements of linear symplectic maps,
//! in the plane and periodized onto the torus.
//!
//! Plane-level elements take a [`LinearStep`] (monodromy, Morse index and
//! matrix set); torus-level elements sum plane elements over integer images
//! of `X2`. On the torus, images of `X2` and windings of the classical orbit
//! are the same set, so the image sum is also the winding sum.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catmap::CatMap;
use crate::error::{Error, Result};
use crate::flows::{morse_track, QuadraticHamiltonian};
use crate::phase_space::{
    cayley_of, det_w, matrix_set_general, matrix_set_hyperbolic, CMat2, FrameMatrixSet, Mat2,
    PhasePoint, CAUSTIC_TOL,
};
use crate::precise::{self, PreciseStep, V2};
use crate::torus::{self, global_phase, TorusHilbert};

/// Below this `|det(M+1)|`, SC3 switches to the caustic-regular form.
pub const REGULAR_SWITCH: f64 = 1e-6;
/// SC2 is rejected below this `|det(M-1)|`.
pub const SHORT_TIME_TOL: f64 = 1e-10;
/// Gaussian exponent cutoff of the image window (`e^{-40} ≈ 4e-18`).
pub const WINDOW_RADIUS: f64 = 40.0;
const MAX_IMAGES: usize = 4_000_000;

/// Which matrix element is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Sc1,
    Sc2,
    Sc3,
    Sc3Lin,
}

impl Method {
    pub const SEMICLASSICAL: [Method; 4] = [Method::Sc1, Method::Sc2, Method::Sc3, Method::Sc3Lin];

    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Sc1 => "sc1",
            Method::Sc2 => "sc2",
            Method::Sc3 => "sc3",
            Method::Sc3Lin => "sc3lin",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Method::Exact),
            "sc1" => Ok(Method::Sc1),
            "sc2" => Ok(Method::Sc2),
            "sc3" => Ok(Method::Sc3),
            "sc3lin" => Ok(Method::Sc3Lin),
            other => Err(Error::InvalidInput(format!("unknown method '{other}'"))),
        }
    }
}

/// Bookkeeping attached to an element.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Diagnostics {
    /// Dominant image (winding) on the torus; zero in the plane.
    pub winding: [i64; 2],
    /// Norm of the Gaussian mismatch vector (`|δ|`, `|d|`, ...) of the dominant term.
    pub mismatch: f64,
    /// Number of images summed (1 in the plane).
    pub images: usize,
}

/// One matrix element `<X1|U^t|X2>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CSElement {
    pub value: Complex64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl CSElement {
    fn plane(value: Complex64, method: Method, mismatch: f64) -> Self {
        CSElement {
            value,
            method,
            diagnostics: Diagnostics {
                winding: [0, 0],
                mismatch,
                images: 1,
            },
        }
    }
}

/// A linear symplectic step: monodromy, CS metric, Morse index and the
/// continuous branch of `arg det[C(M+1) + iJ(1-M)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearStep {
    pub monodromy: Mat2,
    pub metric: Mat2,
    pub alpha: i64,
    pub arg_det_w: f64,
    /// `None` at (or numerically near) a caustic.
    pub frame: Option<FrameMatrixSet>,
}

impl LinearStep {
    /// `t` steps of a cat map, with the closed-form hyperbolic matrix set.
    pub fn from_catmap(map: &CatMap, t: u32) -> Result<Self> {
        let m = if t == 0 {
            Mat2::identity()
        } else {
            map.power(t)?.m
        };
        let frame = matrix_set_hyperbolic(&map.frame, t as f64);
        Ok(LinearStep {
            monodromy: m,
            metric: Mat2::identity(),
            alpha: 0,
            arg_det_w: det_w(&m, &Mat2::identity()).arg(),
            frame: Some(frame),
        })
    }

    /// Flow of a quadratic Hamiltonian for time `t`, with Morse tracking.
    pub fn from_flow(h: &QuadraticHamiltonian, t: f64) -> Self {
        let st = morse_track(h, t, h.default_dt());
        let frame = if (st.m + Mat2::identity()).det().abs() >= REGULAR_SWITCH {
            matrix_set_general(&st.m, &Mat2::identity()).ok()
        } else {
            None
        };
        LinearStep {
            monodromy: st.m,
            metric: Mat2::identity(),
            alpha: st.alpha,
            arg_det_w: st.arg_det_w,
            frame,
        }
    }

    /// Any monodromy with metric `C`, no caustic history (`alpha = 0`,
    /// principal branch).
    pub fn from_monodromy(m: &Mat2, c: &Mat2) -> Self {
        let frame = if (*m + Mat2::identity()).det().abs() >= REGULAR_SWITCH {
            matrix_set_general(m, c).ok()
        } else {
            None
        };
        LinearStep {
            monodromy: *m,
            metric: *c,
            alpha: 0,
            arg_det_w: det_w(m, c).arg(),
            frame,
        }
    }

    fn maslov(&self) -> f64 {
        PI * self.alpha as f64 / 2.0
    }
}

/// Closed overlap of two plane coherent states.
pub fn overlap(x1: PhasePoint, x2: PhasePoint, hbar: f64) -> Complex64 {
    Complex64::new(
        -(x1 - x2).norm_sqr() / (4.0 * hbar),
        -x1.wedge(x2) / (2.0 * hbar),
    )
    .exp()
}

fn gauss_phase(pref: f64, re: f64, im: f64) -> Complex64 {
    Complex64::from_polar(pref * re.exp(), im)
}

/// Center-orbit element: sums over orbits centered at `X = (X1+X2)/2`.
pub fn sc1_plane(step: &LinearStep, x1: PhasePoint, x2: PhasePoint, hbar: f64) -> Result<CSElement> {
    let m = step.monodromy;
    let p1 = m + Mat2::identity();
    let det = p1.det();
    if !(det.abs() >= CAUSTIC_TOL) {
        return Err(Error::Caustic { det: det.abs() });
    }
    let b = cayley_of(&m)?;
    let (x, xi0) = ((x1 + x2) * 0.5, x1 - x2);
    let x_minus = p1.inverse().ok_or(Error::Caustic { det: 0.0 })? * (x * 2.0);
    let v = (m * x_minus - x_minus) - xi0;
    let s = b.quad(x) + hbar * step.maslov();
    let value = gauss_phase(
        2.0 / det.abs().sqrt(),
        -v.norm_sqr() / (4.0 * hbar),
        (s - 0.5 * x1.wedge(x2)) / hbar,
    );
    Ok(CSElement::plane(value, Method::Sc1, v.norm()))
}

/// Chord-orbit element: sums over orbits with chord `ξ0 = X1 - X2`.
pub fn sc2_plane(step: &LinearStep, x1: PhasePoint, x2: PhasePoint, hbar: f64) -> Result<CSElement> {
    let m = step.monodromy;
    let a = m - Mat2::identity();
    let det = a.det();
    if !(det.abs() >= SHORT_TIME_TOL) {
        return Err(Error::ShortTimeDivergence { det: det.abs() });
    }
    let b = cayley_of(&m)?;
    let (x, xi0) = ((x1 + x2) * 0.5, x1 - x2);
    let x0 = a.inverse().ok_or(Error::ShortTimeDivergence { det: 0.0 })? * xi0 + xi0 * 0.5;
    let s_chord = b.quad(x0) + hbar * step.maslov() - xi0.wedge(x0);
    let v = x0 - x;
    let value = gauss_phase(
        2.0 / det.abs().sqrt(),
        -v.norm_sqr() / hbar,
        (s_chord + 0.5 * x1.wedge(x2)) / hbar,
    );
    Ok(CSElement::plane(value, Method::Sc2, v.norm()))
}

fn check_det_w(fs: &FrameMatrixSet) -> Result<f64> {
    let dw = fs.det_w_mod();
    if !(dw >= CAUSTIC_TOL) {
        return Err(Error::AccidentalCaustic { det: dw });
    }
    Ok(dw)
}

/// Complex-center element from the single real orbit centered at `X`,
/// with the point shift `δ = (ξ_γ - ξ0)/2` absorbed by the complex matrices.
/// Falls back to [`sc3_regular`] at caustics.
pub fn sc3_plane(step: &LinearStep, x1: PhasePoint, x2: PhasePoint, hbar: f64) -> Result<CSElement> {
    let Some(fs) = step.frame else {
        return sc3_regular(step, x1, x2, hbar);
    };
    let dw = check_det_w(&fs)?;
    let m = step.monodromy;
    let (x, xi0) = ((x1 + x2) * 0.5, x1 - x2);
    let x_minus = (m + Mat2::identity())
        .inverse()
        .ok_or(Error::Caustic { det: 0.0 })?
        * (x * 2.0);
    let delta = ((m * x_minus - x_minus) - xi0) * 0.5;
    let s = fs.b.quad(x) + hbar * step.maslov();
    let value = gauss_phase(
        2.0 / dw.sqrt(),
        -fs.cbar.quad(delta) / hbar,
        (-0.5 * x1.wedge(x2) + s + fs.bbar.quad(delta)) / hbar - 0.5 * fs.epsilon,
    );
    Ok(CSElement::plane(value, Method::Sc3, delta.norm()))
}

/// Form of the complex-center element that stays finite at caustics:
/// `2 (det W)^{-1/2} exp{[(i/2)X1∧X2 - X·CX + y·(M+1)W⁻¹y]/ħ}`,
/// `W = C(M+1) + iJ(1-M)`, `y = CX + (i/2)Jᵀξ0`. The square-root branch
/// follows the step's continuous `arg det W`.
pub fn sc3_regular(step: &LinearStep, x1: PhasePoint, x2: PhasePoint, hbar: f64) -> Result<CSElement> {
    let (m, c) = (step.monodromy, step.metric);
    let one = Mat2::identity();
    let p1 = m + one;
    let w = CMat2::from_parts(&(c * p1), &(Mat2::j() * (one - m)));
    let dw = w.det();
    if !(dw.norm() >= CAUSTIC_TOL) {
        return Err(Error::AccidentalCaustic { det: dw.norm() });
    }
    let winv = w.inverse().ok_or(Error::AccidentalCaustic { det: 0.0 })?;
    let q = CMat2::from_real(&p1).mul(&winv);
    let (x, xi0) = ((x1 + x2) * 0.5, x1 - x2);
    let cx = c * x;
    let jx = Mat2::j().transpose() * xi0;
    let y = [
        Complex64::new(cx.p, 0.5 * jx.p),
        Complex64::new(cx.q, 0.5 * jx.q),
    ];
    let qy = [
        q.m[0][0] * y[0] + q.m[0][1] * y[1],
        q.m[1][0] * y[0] + q.m[1][1] * y[1],
    ];
    let yqy = y[0] * qy[0] + y[1] * qy[1];
    let expo = (Complex64::new(-c.quad(x), 0.5 * x1.wedge(x2)) + yqy) / hbar;
    let pref = Complex64::from_polar(2.0 / dw.norm().sqrt(), -0.5 * step.arg_det_w);
    Ok(CSElement::plane(pref * expo.exp(), Method::Sc3, 0.0))
}

/// Complex-center element linearized about the orbit launched at `X2`,
/// driven by the drift `d = M X2 - X1`.
pub fn sc3lin_plane(step: &LinearStep, x1: PhasePoint, x2: PhasePoint, hbar: f64) -> Result<CSElement> {
    let fs = step.frame.ok_or(Error::Caustic {
        det: (step.monodromy + Mat2::identity()).det().abs(),
    })?;
    let dw = check_det_w(&fs)?;
    let m = step.monodromy;
    let (x, xi0) = ((x1 + x2) * 0.5, x1 - x2);
    let x2f = m * x2;
    let xi2 = x2f - x2;
    let d = x2f - x1;
    let s2 = fs.b.quad(x2 + xi2 * 0.5) + hbar * step.maslov();
    let ph = s2 + 0.5 * (xi2 + x).wedge(xi0) + (fs.b.scale(0.25) + fs.d).quad(d);
    let value = gauss_phase(2.0 / dw.sqrt(), -fs.e.quad(d) / hbar, ph / hbar - 0.5 * fs.epsilon);
    Ok(CSElement::plane(value, Method::Sc3Lin, d.norm()))
}

/// A plane matrix element that can be periodized: its modulus is a
/// constant times `exp(-v·Gv/ħ)` with `v` affine in `X2`.
pub trait PlaneElement: Sync {
    fn method(&self) -> Method;
    fn eval(&self, x1: PhasePoint, x2: PhasePoint, hbar: f64) -> Result<CSElement>;
    /// Mismatch vector `v` and weight matrix `G`.
    fn mismatch(&self, x1: PhasePoint, x2: PhasePoint) -> Result<(PhasePoint, Mat2)>;

    /// Image term `e^{-(i/2ħ) X2∧k} f(X1, X2 + k)` on the torus, including
    /// the parity sign `e^{iπN k_p k_q}`.
    fn image(&self, x1: PhasePoint, x2: PhasePoint, k: [i64; 2], space: &TorusHilbert) -> Result<Complex64> {
        let h = space.hbar;
        let kv = PhasePoint::new(k[0] as f64, k[1] as f64);
        let sign = if (space.n as i64 * k[0] * k[1]).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let ph = Complex64::from_polar(sign, -x2.wedge(kv) / (2.0 * h));
        Ok(ph * self.eval(x1, x2 + kv, h)?.value)
    }
}

/// Semiclassical element of a given method on a fixed step.
#[derive(Debug, Clone, Copy)]
pub struct ScElement<'a> {
    pub step: &'a LinearStep,
    pub method: Method,
}

impl PlaneElement for ScElement<'_> {
    fn method(&self) -> Method {
        self.method
    }

    fn eval(&self, x1: PhasePoint, x2: PhasePoint, hbar: f64) -> Result<CSElement> {
        match self.method {
            Method::Sc1 => sc1_plane(self.step, x1, x2, hbar),
            Method::Sc2 => sc2_plane(self.step, x1, x2, hbar),
            Method::Sc3 => sc3_plane(self.step, x1, x2, hbar),
            Method::Sc3Lin => sc3lin_plane(self.step, x1, x2, hbar),
            Method::Exact => Err(Error::InvalidInput("exact is not a plane formula".into())),
        }
    }

    fn mismatch(&self, x1: PhasePoint, x2: PhasePoint) -> Result<(PhasePoint, Mat2)> {
        let m = self.step.monodromy;
        let one = Mat2::identity();
        let (x, xi0) = ((x1 + x2) * 0.5, x1 - x2);
        let caustic = || Error::Caustic {
            det: (m + one).det().abs(),
        };
        let center_chord = || -> Result<PhasePoint> {
            let xm = (m + one).inverse().ok_or_else(caustic)? * (x * 2.0);
            Ok(m * xm - xm)
        };
        match self.method {
            Method::Sc1 => Ok((center_chord()? - xi0, one.scale(0.25))),
            Method::Sc2 => {
                let a = (m - one).inverse().ok_or(Error::ShortTimeDivergence { det: 0.0 })?;
                Ok((a * xi0 + xi0 * 0.5 - x, one))
            }
            Method::Sc3 => {
                let fs = self.step.frame.ok_or_else(caustic)?;
                Ok(((center_chord()? - xi0) * 0.5, fs.cbar))
            }
            Method::Sc3Lin => {
                let fs = self.step.frame.ok_or_else(caustic)?;
                Ok((m * x2 - x1, fs.e))
            }
            Method::Exact => Err(Error::InvalidInput("exact is not a plane formula".into())),
        }
    }

    fn image(&self, x1: PhasePoint, x2: PhasePoint, k: [i64; 2], space: &TorusHilbert) -> Result<Complex64> {
        let step = self.step;
        let m = step.monodromy;
        let one = Mat2::identity();
        let maslov = step.maslov();
        let (pref, extra) = match (self.method, step.frame) {
            (Method::Sc1, _) => {
                let det = (m + one).det().abs();
                if !(det >= CAUSTIC_TOL) {
                    return Err(Error::Caustic { det });
                }
                (2.0 / det.sqrt(), maslov)
            }
            (Method::Sc2, _) => {
                let det = (m - one).det().abs();
                if !(det >= SHORT_TIME_TOL) {
                    return Err(Error::ShortTimeDivergence { det });
                }
                (2.0 / det.sqrt(), maslov)
            }
            (Method::Sc3 | Method::Sc3Lin, Some(fs)) => (2.0 / check_det_w(&fs)?.sqrt(), maslov - 0.5 * fs.epsilon),
            (Method::Sc3, None) => {
                let h = space.hbar;
                let kv = PhasePoint::new(k[0] as f64, k[1] as f64);
                let sign = if (space.n as i64 * k[0] * k[1]).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let ph = Complex64::from_polar(sign, -x2.wedge(kv) / (2.0 * h));
                return Ok(ph * sc3_regular(step, x1, x2 + kv, h)?.value);
            }
            (Method::Sc3Lin, None) => return Err(Error::Caustic { det: (m + one).det().abs() }),
            (Method::Exact, _) => return Err(Error::InvalidInput("exact is not a plane formula".into())),
        };
        let st = PreciseStep::new(&m, &step.metric)?;
        let (a, y) = (V2::shifted(x1, [0, 0]), V2::shifted(x2, k));
        let e = match self.method {
            Method::Sc1 => precise::sc1(&st, a, y),
            Method::Sc2 => precise::sc2(&st, a, y)?,
            Method::Sc3 => precise::sc3(&st, a, y),
            _ => precise::sc3lin(&st, a, y),
        };
        Ok(precise::torus_term(&e, x2, k, space.n, pref, extra))
    }
}

/// The identity propagator: plain coherent-state overlap.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overlap;

impl PlaneElement for Overlap {
    fn method(&self) -> Method {
        Method::Exact
    }

    fn eval(&self, x1: PhasePoint, x2: PhasePoint, hbar: f64) -> Result<CSElement> {
        Ok(CSElement::plane(overlap(x1, x2, hbar), Method::Exact, (x1 - x2).norm()))
    }

    fn mismatch(&self, x1: PhasePoint, x2: PhasePoint) -> Result<(PhasePoint, Mat2)> {
        Ok((x1 - x2, Mat2::identity().scale(0.25)))
    }

    fn image(&self, x1: PhasePoint, x2: PhasePoint, k: [i64; 2], space: &TorusHilbert) -> Result<Complex64> {
        let e = precise::overlap(V2::shifted(x1, [0, 0]), V2::shifted(x2, k));
        Ok(precise::torus_term(&e, x2, k, space.n, 1.0, 0.0))
    }
}

/// Torus element from a plane element:
/// `N√(πħ) Σ_k e^{iπN k_p k_q} e^{-(i/2ħ) X2∧k} f(X1, X2 + k)`.
pub fn torus_periodize<E: PlaneElement + ?Sized>(
    elem: &E,
    space: &TorusHilbert,
    x1: PhasePoint,
    x2: PhasePoint,
) -> Result<CSElement> {
    torus_periodize_radius(elem, space, x1, x2, WINDOW_RADIUS)
}

/// As [`torus_periodize`], keeping every image whose Gaussian exponent,
/// measured from its real minimizer, is at most `radius`.
pub fn torus_periodize_radius<E: PlaneElement + ?Sized>(
    elem: &E,
    space: &TorusHilbert,
    x1: PhasePoint,
    x2: PhasePoint,
    radius: f64,
) -> Result<CSElement> {
    let h = space.hbar;
    let (v0, g) = elem.mismatch(x1, x2)?;
    let (va, _) = elem.mismatch(x1, x2 + PhasePoint::new(1.0, 0.0))?;
    let (vb, _) = elem.mismatch(x1, x2 + PhasePoint::new(0.0, 1.0))?;
    let a = Mat2::from_cols(va - v0, vb - v0);
    let ainv = a
        .inverse()
        .ok_or_else(|| Error::InvalidInput("degenerate image window".into()))?;
    let q = g.congruence(&a).scale(1.0 / h);
    let qi = q
        .inverse()
        .ok_or_else(|| Error::InvalidInput("degenerate image window".into()))?;
    let kc = -(ainv * v0);
    let ext = (radius * qi.m[0][0]).sqrt();
    let (q11, q12, q22) = (q.m[0][0], q.m[0][1], q.m[1][1]);

    let mut sum = Complex64::new(0.0, 0.0);
    let mut images = 0usize;
    let mut best = (f64::NEG_INFINITY, [0i64; 2], 0.0);
    for kp in (kc.p - ext).ceil() as i64..=(kc.p + ext).floor() as i64 {
        let dp = kp as f64 - kc.p;
        let disc = q12 * q12 * dp * dp - q22 * (q11 * dp * dp - radius);
        if disc < 0.0 {
            continue;
        }
        let mid = kc.q - q12 * dp / q22;
        let half = disc.sqrt() / q22;
        for kq in (mid - half).ceil() as i64..=(mid + half).floor() as i64 {
            images += 1;
            if images > MAX_IMAGES {
                return Err(Error::InvalidInput("image window too large".into()));
            }
            let k = PhasePoint::new(kp as f64, kq as f64);
            let term = elem.image(x1, x2, [kp, kq], space)?;
            let mag = term.norm();
            if mag > best.0 {
                let (v, _) = elem.mismatch(x1, x2 + k)?;
                best = (mag, [kp, kq], v.norm());
            }
            sum += term;
        }
    }
    Ok(CSElement {
        value: sum * (space.n as f64 * (PI * h).sqrt()),
        method: elem.method(),
        diagnostics: Diagnostics {
            winding: best.1,
            mismatch: best.2,
            images,
        },
    })
}

/// Semiclassical (or exact, for [`Method::Exact`]) torus element of `t` steps of `map`.
///
/// Semiclassical values follow the metaplectic phase convention; multiply by
/// [`torus::global_phase`] to compare with the Hannay-Berry propagator.
pub fn torus_element(
    map: &CatMap,
    space: &TorusHilbert,
    method: Method,
    x1: PhasePoint,
    x2: PhasePoint,
    t: u32,
) -> Result<CSElement> {
    if method == Method::Exact {
        return Ok(torus::exact_cs_element(space, x1, x2, t as i64));
    }
    let step = LinearStep::from_catmap(map, t)?;
    torus_periodize(&ScElement { step: &step, method }, space, x1, x2)
}

pub fn sc1_element(map: &CatMap, space: &TorusHilbert, x1: PhasePoint, x2: PhasePoint, t: u32) -> Result<CSElement> {
    torus_element(map, space, Method::Sc1, x1, x2, t)
}

pub fn sc2_element(map: &CatMap, space: &TorusHilbert, x1: PhasePoint, x2: PhasePoint, t: u32) -> Result<CSElement> {
    torus_element(map, space, Method::Sc2, x1, x2, t)
}

pub fn sc3_element(map: &CatMap, space: &TorusHilbert, x1: PhasePoint, x2: PhasePoint, t: u32) -> Result<CSElement> {
    torus_element(map, space, Method::Sc3, x1, x2, t)
}

pub fn sc3_linearized(map: &CatMap, space: &TorusHilbert, x1: PhasePoint, x2: PhasePoint, t: u32) -> Result<CSElement> {
    torus_element(map, space, Method::Sc3Lin, x1, x2, t)
}

/// Relative amplitude error `||a| - |b|| / |b|`.
pub fn amplitude_error(approx: Complex64, exact: Complex64) -> f64 {
    (approx.norm() - exact.norm()).abs() / exact.norm()
}

/// Principal phase of `approx / exact`.
pub fn phase_error(approx: Complex64, exact: Complex64) -> f64 {
    (approx / exact).arg()
}

/// One row of an error sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub method: Method,
    pub exact: Complex64,
    pub value: Option<Complex64>,
    pub amp_err: Option<f64>,
    pub phase_err: Option<f64>,
    pub error: Option<String>,
}

/// Errors of each method against the exact element for every `N`, computed
/// in parallel with rows ordered by `ns` then `methods`. Semiclassical values
/// are multiplied by [`global_phase`] before comparison.
pub fn error_sweep(
    map: &CatMap,
    ns: &[usize],
    t: u32,
    x1: PhasePoint,
    x2: PhasePoint,
    methods: &[Method],
) -> Vec<SweepRow> {
    let step = LinearStep::from_catmap(map, t);
    let g = global_phase(t as i64);
    ns.par_iter()
        .map(|&n| {
            let Ok(space) = TorusHilbert::new(n) else {
                return methods
                    .iter()
                    .map(|&method| SweepRow {
                        n,
                        method,
                        exact: Complex64::new(f64::NAN, f64::NAN),
                        value: None,
                        amp_err: None,
                        phase_err: None,
                        error: Some("invalid dimension".into()),
                    })
                    .collect::<Vec<_>>();
            };
            let exact = torus::exact_cs_element(&space, x1, x2, t as i64).value;
            methods
                .iter()
                .map(|&method| {
                    let res = match (&step, method) {
                        (_, Method::Exact) => Ok(exact * g.conj()),
                        (Ok(st), m) => {
                            torus_periodize(&ScElement { step: st, method: m }, &space, x1, x2).map(|e| e.value)
                        }
                        (Err(e), _) => Err(e.clone()),
                    };
                    match res {
                        Ok(v) => {
                            let v = v * g;
                            SweepRow {
                                n,
                                method,
                                exact,
                                value: Some(v),
                                amp_err: Some(amplitude_error(v, exact)),
                                phase_err: Some(phase_error(v, exact)),
                                error: None,
                            }
                        }
                        Err(e) => SweepRow {
                            n,
                            method,
                            exact,
                            value: None,
                            amp_err: None,
                            phase_err: None,
                            error: Some(e.to_string()),
                        },
                    }
                })
                .collect()
        })
        .collect::<Vec<Vec<_>>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}
