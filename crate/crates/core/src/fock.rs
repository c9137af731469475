//! Number-basis propagator for quadratic Hamiltonians, used as an exact
//! reference independent of the semiclassical code.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flows::QuadraticHamiltonian;
use crate::phase_space::PhasePoint;

const TAIL_TOL: f64 = 1e-12;
const STABILITY_TOL: f64 = 1e-9;
const MAX_DIM: usize = 40_000;
/// Largest `‖H‖·dt` per Taylor step.
const TAYLOR_STEP: f64 = 4.0;

/// Size of the truncated number basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockTruncation {
    pub n_max: usize,
    pub hbar: f64,
}

impl FockTruncation {
    pub fn new(n_max: usize, hbar: f64) -> Result<Self> {
        if n_max < 8 {
            return Err(Error::InvalidInput("n_max must be at least 8".into()));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidInput("hbar must be positive".into()));
        }
        Ok(FockTruncation { n_max, hbar })
    }

    /// `n_max = 128`, the starting size of the escalation.
    pub fn default_for(hbar: f64) -> Self {
        FockTruncation { n_max: 128, hbar }
    }
}

/// Coefficients `e^{-|a|²/2} a^n/√n!`, `a = (Q + iP)/√(2ħ)`, for `n ≤ n_max`.
pub fn cs_fock_coefficients(x: PhasePoint, trunc: &FockTruncation) -> Result<Vec<Complex64>> {
    let a = Complex64::new(x.q, x.p) / (2.0 * trunc.hbar).sqrt();
    let (la, arg) = (a.norm().ln(), a.arg());
    let zero = a.norm() == 0.0;
    let mut logm = -0.5 * a.norm_sqr();
    let mut out = Vec::with_capacity(trunc.n_max + 1);
    for n in 0..=trunc.n_max {
        if n > 0 {
            logm += la - 0.5 * (n as f64).ln();
        }
        let c = if zero && n > 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(logm.exp(), n as f64 * arg)
        };
        out.push(c);
    }
    // tail mass, summed term by term past n_max
    let mut tail = 0.0;
    if !zero {
        let mut n = trunc.n_max;
        loop {
            n += 1;
            logm += la - 0.5 * (n as f64).ln();
            let w = (2.0 * logm).exp();
            tail += w;
            if (n as f64) > a.norm_sqr() && w < 1e-30 {
                break;
            }
        }
    }
    if tail > TAIL_TOL {
        return Err(Error::Truncation(format!(
            "coherent state tail mass {tail:e} beyond n_max = {}",
            trunc.n_max
        )));
    }
    Ok(out)
}

/// `Ĥ/ħ` in the number basis: diagonal and the `⟨n|·|n+2⟩` band
/// (the `⟨n+2|·|n⟩` band is its conjugate).
struct Pentadiagonal {
    diag: Vec<f64>,
    up2: Vec<Complex64>,
}

impl Pentadiagonal {
    /// Symmetric ordering: `p² = (ħ/2)(-a² - a†² + 2a†a + 1)`,
    /// `q² = (ħ/2)(a² + a†² + 2a†a + 1)`, `pq + qp = iħ(a†² - a²)`.
    fn new(h: &QuadraticHamiltonian, dim: usize) -> Self {
        let (hpp, hpq, hqq) = (h.h.m[0][0], h.h.m[0][1], h.h.m[1][1]);
        let diag = (0..dim)
            .map(|n| 0.25 * (hpp + hqq) * (2.0 * n as f64 + 1.0))
            .collect();
        let c = 0.5 * Complex64::new(0.5 * (hqq - hpp), -hpq);
        let up2 = (0..dim.saturating_sub(2))
            .map(|n| c * (((n + 1) * (n + 2)) as f64).sqrt())
            .collect();
        Pentadiagonal { diag, up2 }
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = x.len();
        for i in 0..n {
            let mut s = x[i] * self.diag[i];
            if i + 2 < n {
                s += self.up2[i] * x[i + 2];
            }
            if i >= 2 {
                s += self.up2[i - 2].conj() * x[i - 2];
            }
            y[i] = s;
        }
    }

    fn norm_bound(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i + 2 < n {
                    s += self.up2[i].norm();
                }
                if i >= 2 {
                    s += self.up2[i - 2].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// `exp(-i t H) v` by scaled Taylor steps.
    fn propagate(&self, v: &[Complex64], t: f64) -> Vec<Complex64> {
        let nb = self.norm_bound();
        let steps = ((t.abs() * nb / TAYLOR_STEP).ceil() as usize).max(1);
        let dt = t / steps as f64;
        let mi = Complex64::new(0.0, -dt);
        let mut psi = v.to_vec();
        let mut term = vec![Complex64::new(0.0, 0.0); v.len()];
        let mut tmp = term.clone();
        for _ in 0..steps {
            term.copy_from_slice(&psi);
            let scale = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for k in 1..200 {
                self.apply(&term, &mut tmp);
                let f = mi / k as f64;
                let mut tn = 0.0;
                for (a, b) in term.iter_mut().zip(tmp.iter()) {
                    *a = b * f;
                    tn += a.norm_sqr();
                }
                for (p, a) in psi.iter_mut().zip(term.iter()) {
                    *p += a;
                }
                if tn.sqrt() < 1e-18 * scale {
                    break;
                }
            }
        }
        psi
    }
}

fn element_at(
    h: &QuadraticHamiltonian,
    x1: PhasePoint,
    x2: PhasePoint,
    t: f64,
    trunc: &FockTruncation,
) -> Result<(Complex64, f64)> {
    let c1 = cs_fock_coefficients(x1, trunc)?;
    let c2 = cs_fock_coefficients(x2, trunc)?;
    let hm = Pentadiagonal::new(h, trunc.n_max + 1);
    let psi = hm.propagate(&c2, t);
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let v = c1.iter().zip(psi.iter()).map(|(a, b)| a.conj() * b).sum();
    Ok((v, norm))
}

/// Result of the oracle with the truncation that passed the stability check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    pub n_max: usize,
    /// `|value(n_max) - value(n_max + 8)|`.
    pub shift: f64,
    /// Norm of the propagated `|X2>` (1 when the basis resolves it).
    pub norm: f64,
}

/// `<X1|exp(-itĤ/ħ)|X2>`, escalating `n_max` by 1.5× from `trunc.n_max`
/// until the value moves by at most `1e-9` under `n_max -> n_max + 8`.
pub fn exact_cs_propagator(
    h: &QuadraticHamiltonian,
    x1: PhasePoint,
    x2: PhasePoint,
    t: f64,
    trunc: &FockTruncation,
) -> Result<OracleValue> {
    let mut n = trunc.n_max;
    let mut last_err = None;
    while n <= MAX_DIM {
        let lo = FockTruncation { n_max: n, ..*trunc };
        let hi = FockTruncation { n_max: n + 8, ..*trunc };
        match (element_at(h, x1, x2, t, &lo), element_at(h, x1, x2, t, &hi)) {
            (Ok((a, _)), Ok((b, norm))) => {
                let shift = (a - b).norm();
                if shift <= STABILITY_TOL {
                    return Ok(OracleValue {
                        value: b,
                        n_max: n + 8,
                        shift,
                        norm,
                    });
                }
                last_err = Some(format!("shift {shift:e} at n_max = {n}"));
            }
            (Err(e), _) | (_, Err(e)) => last_err = Some(e.to_string()),
        }
        n = n * 3 / 2;
    }
    Err(Error::Truncation(format!(
        "no stable truncation up to {MAX_DIM}: {}",
        last_err.unwrap_or_default()
    )))
}
