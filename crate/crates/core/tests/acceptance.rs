//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

use std::f64::consts::PI;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use scprop::cli::{figure2_table, Cell, Cli, Command};
use scprop::fock::{exact_cs_propagator, FockTruncation};
use scprop::phase_space::{matrix_set_general, matrix_set_hyperbolic, metric_of};
use scprop::semiclassical::{
    amplitude_error, overlap, phase_error, sc3_element, sc3_linearized, sc3_plane, spearman, LinearStep, PlaneElement,
    ScElement,
};
use scprop::torus::{
    exact_cs_element, global_phase, hannay_berry, nilpotency_period, torus_weyl_symbol, weyl_symbol_closed_form_grid,
};
use scprop::weyl_ops::{compose_identities_report, weyl_symbol_via_reflection, LatticeCenter};
use scprop::{CatMap, Complex64, Mat2, Method, OperatorMatrix, PhasePoint, QuadraticHamiltonian, TorusHilbert};

struct Outcome {
    pass: bool,
    detail: String,
}

fn odd(lo: usize, hi: usize) -> Vec<usize> {
    (lo..=hi).filter(|n| n % 2 == 1).collect()
}

fn max(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// SC3 against Hannay-Berry on the cat map.
fn c1() -> Outcome {
    const TOL: f64 = 1e-9;
    let map = CatMap::standard();
    let errs: Vec<(f64, f64)> = odd(3, 31)
        .par_iter()
        .flat_map_iter(|&n| {
            let space = TorusHilbert::new(n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + n as u64);
            let pairs: Vec<_> = (0..20)
                .map(|_| {
                    (
                        PhasePoint::new(rng.gen(), rng.gen()),
                        PhasePoint::new(rng.gen(), rng.gen()),
                    )
                })
                .collect();
            let map = &map;
            (1..=3u32).flat_map(move |t| {
                let space = space;
                pairs.clone().into_iter().map(move |(x1, x2)| {
                    let ex = exact_cs_element(&space, x1, x2, t as i64).value;
                    match sc3_element(map, &space, x1, x2, t) {
                        Ok(e) => {
                            let v = e.value * global_phase(t as i64);
                            (amplitude_error(v, ex), phase_error(v, ex).abs())
                        }
                        Err(_) => (f64::NAN, f64::NAN),
                    }
                })
            })
        })
        .collect();
    let amp = max(errs.iter().map(|e| e.0));
    let ph = max(errs.iter().map(|e| e.1));
    Outcome {
        pass: amp < TOL && ph < TOL,
        detail: format!("{} elements, max amp err {amp:.2e}, max phase err {ph:.2e} (tol {TOL:e})", errs.len()),
    }
}

/// Qualitative features of the SC1/SC2 error curves.
fn c2() -> Outcome {
    let cli = <Cli as clap::Parser>::try_parse_from(["scprop", "figure2"]).unwrap();
    let Command::Figure2(args) = cli.command else { unreachable!() };
    let table = match figure2_table(&args) {
        Ok(t) => t,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e.to_string(),
            }
        }
    };
    let col = |name: &str| -> Vec<f64> {
        table
            .column(name)
            .unwrap()
            .into_iter()
            .map(|c| match c {
                Cell::Float(x) => *x,
                Cell::Int(i) => *i as f64,
                Cell::Text(_) => f64::NAN,
            })
            .collect()
    };
    let (ns, e1, e2, e3) = (col("n"), col("e_sc1"), col("e_sc2"), col("e_sc3"));
    let min1 = e1.iter().cloned().fold(f64::INFINITY, f64::min);
    let rho = spearman(&ns, &e2);
    let max3 = max(e3);
    Outcome {
        pass: min1 > 0.1 && rho > 0.9 && max3 < 1e-9,
        detail: format!(
            "N = 3..31, min E_sc1 = {min1:.3} (> 0.1), Spearman(N, E_sc2) = {rho:.4} (> 0.9), max E_sc3 = {max3:.1e}"
        ),
    }
}

/// SC3 at t = 0 is the plane overlap.
fn c3() -> Outcome {
    const TOL: f64 = 1e-14;
    let step = LinearStep::from_monodromy(&Mat2::identity(), &Mat2::identity());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x1 = PhasePoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let x2 = PhasePoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let hbar = rng.gen_range(0.05..1.0);
        let e = match sc3_plane(&step, x1, x2, hbar) {
            Ok(e) => rel(e.value, overlap(x1, x2, hbar)),
            Err(_) => f64::NAN,
        };
        worst = max([worst, e]);
    }
    Outcome {
        pass: worst < TOL,
        detail: format!("100 plane pairs, max rel err {worst:.2e} (tol {TOL:e})"),
    }
}

/// SC3 against the number-basis oracle for quadratic flows.
fn c4() -> Outcome {
    const TOL: f64 = 1e-8;
    let pairs = [
        (PhasePoint::new(0.4, -0.3), PhasePoint::new(-0.2, 0.5)),
        (PhasePoint::new(1.0, 0.6), PhasePoint::new(0.3, -0.8)),
        (PhasePoint::new(0.0, 0.0), PhasePoint::new(0.7, 0.2)),
    ];
    let ho = QuadraticHamiltonian::harmonic();
    let io = QuadraticHamiltonian::inverted();
    let mut jobs: Vec<(QuadraticHamiltonian, f64, PhasePoint, PhasePoint)> = Vec::new();
    for k in 1..=64 {
        let t = k as f64 * 4.0 * PI / 64.0;
        for &(x1, x2) in &pairs {
            jobs.push((ho, t, x1, x2));
        }
    }
    for k in 0..=8 {
        let t = k as f64 * 0.25;
        for &(x1, x2) in &pairs {
            jobs.push((io, t, x1, x2));
        }
    }
    let res: Vec<(bool, f64, f64, bool)> = jobs
        .par_iter()
        .map(|&(h, t, x1, x2)| {
            let step = LinearStep::from_flow(&h, t);
            let sc = ScElement {
                step: &step,
                method: Method::Sc3,
            }
            .eval(x1, x2, h.hbar);
            let ex = exact_cs_propagator(&h, x1, x2, t, &FockTruncation::default_for(h.hbar));
            let ho_flag = h == ho;
            match (sc, ex) {
                (Ok(s), Ok(e)) => (
                    ho_flag,
                    amplitude_error(s.value, e.value),
                    phase_error(s.value, e.value).abs(),
                    s.value.is_finite(),
                ),
                _ => (ho_flag, f64::NAN, f64::NAN, false),
            }
        })
        .collect();
    let part = |want: bool| {
        let r: Vec<_> = res.iter().filter(|r| r.0 == want).collect();
        (max(r.iter().map(|r| r.1)), max(r.iter().map(|r| r.2)), r.iter().all(|r| r.3))
    };
    let (ha, hp, hf) = part(true);
    let (ia, ip, ifin) = part(false);
    Outcome {
        pass: ha < TOL && hp < TOL && ia < TOL && ip < TOL && hf && ifin,
        detail: format!(
            "HO t = k*4pi/64 (incl. pi, 3pi): amp {ha:.1e}, phase {hp:.1e}; IO t in [0,2]: amp {ia:.1e}, phase {ip:.1e} (tol {TOL:e})"
        ),
    }
}

/// Translation/reflection algebra.
fn c5() -> Outcome {
    const TOL: f64 = 1e-10;
    let reps: Vec<_> = odd(3, 15)
        .par_iter()
        .map(|&n| compose_identities_report(&TorusHilbert::new(n).unwrap(), 40, 5 + n as u64))
        .collect();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for r in reps {
        match r {
            Ok(r) => worst = worst.max(r.max_deviation()),
            Err(_) => ok = false,
        }
    }
    Outcome {
        pass: ok && worst < TOL,
        detail: format!("N = 3..15 odd, TT, RT, TR, RR products, three reflections, R^2 = 1, completeness, orthogonality: max dev {worst:.1e} (tol {TOL:e})"),
    }
}

/// Unitarity, periodicity, symbol symmetry.
fn c6() -> Outcome {
    let unit = max((1..=64).into_par_iter().map(|n| {
        let s = TorusHilbert::new(n).unwrap();
        hannay_berry(&s).unitarity_defect()
    }).collect::<Vec<_>>());
    // U^k = e^{iφ}·1, checked independently of the search
    let nil: Vec<_> = (1..=32usize)
        .into_par_iter()
        .map(|n| {
            let s = TorusHilbert::new(n).unwrap();
            let u = hannay_berry(&s);
            nilpotency_period(&s, &u).map(|(k, phi)| {
                let want = OperatorMatrix::identity(n).scale(Complex64::from_polar(1.0, phi));
                (k, u.pow(k as i64).max_abs_diff(&want))
            })
        })
        .collect();
    let nil_dev = max(nil.iter().map(|r| r.as_ref().map(|(_, d)| *d).unwrap_or(f64::NAN)));
    let nil_ok = nil_dev < 1e-10;
    let sym = max(odd(3, 31).par_iter().map(|&n| {
        let s = TorusHilbert::new(n).unwrap();
        let u = hannay_berry(&s);
        let mut e: f64 = 0.0;
        for t in 1..=3 {
            let w = torus_weyl_symbol(&s, &u.pow(t)).unwrap();
            let wi = torus_weyl_symbol(&s, &u.pow(-t)).unwrap();
            for a in 0..n {
                for b in 0..n {
                    let (ma, mb) = ((n - a) % n, (n - b) % n);
                    e = e
                        .max((w[[a, b]] - w[[ma, b]]).norm())
                        .max((w[[a, b]] - w[[a, mb]]).norm())
                        .max((w[[a, b]] - wi[[ma, b]].conj()).norm());
                }
            }
        }
        e
    }).collect::<Vec<_>>());
    let ks: Vec<String> = nil
        .iter()
        .take(8)
        .map(|r| r.as_ref().map(|(k, _)| k.to_string()).unwrap_or("-".into()))
        .collect();
    Outcome {
        pass: unit < 1e-12 && nil_ok && sym < 1e-10,
        detail: format!(
            "unitarity N<=64 {unit:.1e}; U^k(N) ∝ 1 for N<=32, dev {nil_dev:.1e} (k(1..8) = {}); symbol time-reversal symmetry {sym:.1e}",
            ks.join(",")
        ),
    }
}

/// Independent routes to the same quantities.
fn c7() -> Outcome {
    let map = CatMap::standard();
    let frame = map.frame;
    let sets = max((1..=6).map(|t| {
        let h = matrix_set_hyperbolic(&frame, t as f64);
        let g = matrix_set_general(&map.power(t).unwrap().m, &Mat2::identity()).unwrap();
        h.max_abs_diff(&g)
    }));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut lin: f64 = 0.0;
    for n in [3, 5, 9, 15, 21, 31] {
        let s = TorusHilbert::new(n).unwrap();
        for t in 1..=3 {
            for _ in 0..5 {
                let x1 = PhasePoint::new(rng.gen(), rng.gen());
                let x2 = PhasePoint::new(rng.gen(), rng.gen());
                let a = sc3_linearized(&map, &s, x1, x2, t).map(|e| e.value);
                let b = sc3_element(&map, &s, x1, x2, t).map(|e| e.value);
                lin = max([lin, match (a, b) {
                    (Ok(a), Ok(b)) => rel(a, b),
                    _ => f64::NAN,
                }]);
            }
        }
    }

    let mut symb: f64 = 0.0;
    for n in [3, 5, 7, 11, 15] {
        let s = TorusHilbert::new(n).unwrap();
        let u = hannay_berry(&s);
        for t in 1..=3u32 {
            let ut = u.pow(t as i64);
            let closed = weyl_symbol_closed_form_grid(&map.power(t).unwrap(), &s);
            for a in 0..n as i64 {
                for b in 0..n as i64 {
                    let r = weyl_symbol_via_reflection(&s, &ut, LatticeCenter::integer(a, b)).unwrap();
                    let c = closed[[a as usize, b as usize]] * global_phase(t as i64);
                    symb = symb.max((r - c).norm());
                }
            }
        }
    }

    let mut grad: f64 = 0.0;
    let h = 1e-6;
    for t in 1..=3u32 {
        let pw = map.power(t).unwrap();
        for _ in 0..20 {
            let x = PhasePoint::new(rng.gen(), rng.gen());
            let m = [rng.gen_range(-1..=1), rng.gen_range(-1..=1)];
            let s = |d: PhasePoint| pw.center_action(x + d, m);
            let dp = (s(PhasePoint::new(h, 0.0)) - s(PhasePoint::new(-h, 0.0))) / (2.0 * h);
            let dq = (s(PhasePoint::new(0.0, h)) - s(PhasePoint::new(0.0, -h))) / (2.0 * h);
            let chord = -(Mat2::j() * PhasePoint::new(dp, dq));
            let seg = map.orbit_with_center(x, m, t).unwrap();
            grad = grad.max((chord - seg.chord).norm());
        }
    }
    Outcome {
        pass: sets < 1e-10 && lin < 1e-12 && symb < 1e-10 && grad < 1e-6,
        detail: format!(
            "matrix sets {sets:.1e} (1e-10); sc3lin vs sc3 {lin:.1e} (1e-12); reflection vs classical symbol {symb:.1e} (1e-10); action gradient vs chord {grad:.1e} (1e-6)"
        ),
    }
}

/// Constants implied by the map and its eigenframe.
fn c8() -> Outcome {
    const TOL: f64 = 1e-12;
    let map = CatMap::standard();
    let f = map.frame;
    let one = Mat2::identity();
    let m = map.m;
    let checks = [
        ((f.lambda / 2.0).tanh(), 1.0 / 3f64.sqrt()),
        ((m + one).det(), 6.0),
        ((m * m + one).det(), 16.0),
        (f.zeta_u.wedge(f.zeta_s), 1.0),
        (f.zeta_u.dot(f.zeta_s), -1.0 / 3f64.sqrt()),
        (metric_of(&f).det(), 1.0),
    ];
    let worst = max(checks.iter().map(|(a, b)| (a - b).abs()));
    Outcome {
        pass: worst < TOL,
        detail: format!("tanh(l/2), det(M+1), det(M^2+1), zu^zs, zu.zs, det C: max dev {worst:.1e} (tol {TOL:e})"),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("SC3 exact on the cat map", c1),
        ("SC1/SC2 error curves", c2),
        ("t = 0 overlap", c3),
        ("quadratic flows vs number-basis oracle", c4),
        ("operator algebra", c5),
        ("exact quantum layer", c6),
        ("consistency oracles", c7),
        ("derived constants", c8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {}/8 passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
