//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use betageom_core::cone::{
    expected_fk_cone, expected_upsilon, prob_proper, ratio_to_f64, wendel_reference, ConeSpec, WendelQuantity,
};
use betageom_core::montecarlo::RngSpec;
use betageom_core::polytope::{
    expected_fk_poly, expected_intrinsic_volume, expected_volume, simplex_volume_moment, sylvester_probability, PolySpec,
};
use betageom_core::quantities::{
    a1_quantity, a_quantity, b1_quantity, b_quantity, ext_double_integral, ext_quantity, int_quantity, s_sum, theta, ThetaArgs,
};
use betageom_core::special::{inv_c, kappa};
use betageom_core::subsets::{binomial, members};
use betageom_core::{GammaMultiset, QuadConfig};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    RngSpec::new(seed, 0).rng()
}

fn ms(v: &[f64]) -> GammaMultiset {
    GammaMultiset::new(v.iter().copied()).unwrap()
}

fn without(v: &[f64], skip: &[usize]) -> Vec<f64> {
    v.iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, x)| *x)
        .collect()
}

fn a(alpha: f64, args: &[f64]) -> f64 {
    a_quantity(alpha, &ms(args), &cfg()).unwrap().value
}

fn a1(alpha: f64, args: &[f64]) -> f64 {
    a1_quantity(alpha, &ms(args), &cfg()).unwrap().value
}

fn b(alpha: f64, args: &[f64]) -> f64 {
    b_quantity(alpha, &ms(args), &cfg()).unwrap().value
}

fn b1(alpha: f64, args: &[f64]) -> f64 {
    b1_quantity(alpha, &ms(args), &cfg()).unwrap().value
}

/// Residual of a recurrence, relative to the size of its terms when they exceed one.
fn rel(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
}

fn uniform_vec(r: &mut ChaCha8Rng, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| r.random_range(lo..hi)).collect()
}

fn theta_value(x: f64, y: &[f64], z: &[f64]) -> f64 {
    theta(&ThetaArgs::from_slices(x, y, z).unwrap(), &cfg()).unwrap().value
}

fn theta_identities() -> Verdict {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = r.random_range(1..=6);
        let x = r.random_range(-0.4..6.0);
        let pool = uniform_vec(&mut r, n, 0.0, 8.0);
        let (mut even, mut odd) = (0.0, 0.0);
        for mask in 0u32..(1 << n) {
            let y: Vec<f64> = members(mask).map(|i| pool[i]).collect();
            let z: Vec<f64> = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| pool[i]).collect();
            let t = theta_value(x, &y, &z);
            if mask.count_ones() % 2 == 0 {
                even += t;
            } else {
                odd += t;
            }
        }
        worst = worst
            .max((even + odd - 1.0).abs())
            .max((even - 0.5).abs())
            .max((odd - 0.5).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= 1e-7 && secs <= 60.0,
        format!("50 sets, max residual {worst:.2e} (<= 1e-7), {secs:.1} s (<= 60 s)"),
    )
}

fn recurrences() -> Verdict {
    let start = Instant::now();
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = r.random_range(0..=4);
        let args = uniform_vec(&mut r, d, 0.0, 4.0);
        let alpha = args.iter().sum::<f64>() + r.random_range(0.2..5.0);
        let rhs: f64 = (0..d).map(|j| a1(alpha - args[j], &without(&args, &[j]))).sum();
        worst = worst.max(rel(alpha * a(alpha, &args) - (alpha + 1.0) * a(alpha + 2.0, &args), rhs));
        let rhs: f64 = -(0..d).map(|j| a(alpha - args[j], &without(&args, &[j]))).sum::<f64>();
        worst = worst.max(rel(alpha * a1(alpha, &args), rhs));
        let mut rhs = 0.0;
        for j1 in 0..d {
            for j2 in (0..d).filter(|j2| *j2 != j1) {
                rhs += a(alpha - args[j1] - args[j2], &without(&args, &[j1, j2])) / (alpha - args[j1]);
            }
        }
        worst = worst.max(rel((alpha + 1.0) * a(alpha + 2.0, &args) - alpha * a(alpha, &args), rhs));

        let beta = r.random_range(1.1..8.0);
        let rhs: f64 = -(0..d).map(|j| b1(beta + args[j], &without(&args, &[j]))).sum::<f64>();
        worst = worst.max(rel(beta * b(beta, &args) - (beta - 1.0) * b(beta - 2.0, &args), rhs));
        let rhs: f64 = (0..d).map(|j| b(beta + args[j], &without(&args, &[j]))).sum();
        worst = worst.max(rel(beta * b1(beta, &args), rhs));
        let mut rhs = 0.0;
        for j1 in 0..d {
            for j2 in (0..d).filter(|j2| *j2 != j1) {
                rhs += b(beta + args[j1] + args[j2], &without(&args, &[j1, j2])) / (beta + args[j1]);
            }
        }
        worst = worst.max(rel((beta - 1.0) * b(beta - 2.0, &args) - beta * b(beta, &args), rhs));
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= 1e-7 && secs <= 60.0,
        format!("100 instances, max residual {worst:.2e} (<= 1e-7), {secs:.1} s (<= 60 s)"),
    )
}

fn periodicity() -> Verdict {
    let mut r = rng(3);
    let (mut period, mut closed_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..30 {
        let d = r.random_range(1..=3);
        let lambdas = uniform_vec(&mut r, d, 0.0, 4.0);
        let lambda = r.random_range(-0.9..4.0);
        let closed = 2.0 * PI * lambdas.iter().map(|l| inv_c(0.5 * l - 0.5)).product::<f64>();
        for zeta in [-1, 1] {
            let s0 = s_sum(lambda, &lambdas, zeta, &cfg()).unwrap();
            let s2 = s_sum(lambda + 2.0, &lambdas, zeta, &cfg()).unwrap();
            period = period.max((s0 - s2).abs());
            let want = if zeta == 1 { closed } else { 0.0 };
            closed_err = closed_err.max((s0 - want).abs());
        }
    }
    verdict(
        period <= 1e-7 && closed_err <= 1e-7,
        format!("30 instances, period gap {period:.2e}, closed-value gap {closed_err:.2e} (<= 1e-7)"),
    )
}

fn special_values() -> Verdict {
    let mut r = rng(4);
    let (mut special, mut vanish): (f64, f64) = (0.0, 0.0);
    for d in 1..=3usize {
        for _ in 0..20 {
            let args = uniform_vec(&mut r, d + 1, 0.0, 5.0);
            let s: f64 = args.iter().sum();
            let want = PI * args.iter().map(|x| 1.0 / (x + 1.0)).product::<f64>();
            special = special.max((a(d as f64 + 2.0 + s, &args) - want).abs() / want);
            let mut l = 0i64;
            while d as i64 - 2 * l >= 1 {
                vanish = vanish.max(a((d as i64 - 2 * l) as f64 + s, &args).abs());
                l += 1;
            }
        }
    }
    verdict(
        special <= 1e-8 && vanish <= 1e-8,
        format!("60 tuples, special value rel {special:.2e} (<= 1e-8), vanishing {vanish:.2e} (<= 1e-8)"),
    )
}

fn ext_dual_path() -> Verdict {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let d = r.random_range(1..=4);
        let betas = uniform_vec(&mut r, d, 0.0, 3.0);
        let beta = r.random_range(-0.5..4.0);
        let via_theta = ext_quantity(beta, &betas, &cfg()).unwrap();
        let direct = ext_double_integral(beta, &betas, &cfg()).unwrap();
        worst = worst.max((via_theta - direct).abs());
    }
    verdict(worst <= 1e-8, format!("30 instances, max gap {worst:.2e} (<= 1e-8)"))
}

fn simplex_volume() -> Verdict {
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    for d in 2..=5usize {
        for _ in 0..5 {
            let betas = uniform_vec(&mut r, d + 1, -1.0, 3.0);
            let spec = PolySpec::new(d, betas.clone()).unwrap();
            let theta_sum = expected_volume(&spec, &cfg()).unwrap();
            let gamma = simplex_volume_moment(&spec, 1.0).unwrap();
            let shifted: Vec<f64> = betas.iter().map(|b| b - 0.5).collect();
            let int = 2.0 * kappa(d) * int_quantity(-0.5, &shifted, &cfg()).unwrap();
            worst = worst.max((theta_sum - gamma).abs() / gamma).max((int - gamma).abs() / gamma);
        }
    }
    let uniform = expected_volume(&PolySpec::new(2, vec![0.0; 3]).unwrap(), &cfg()).unwrap();
    let gap = (uniform - 35.0 / (48.0 * PI)).abs();
    verdict(
        worst <= 1e-7 && gap <= 1e-7,
        format!("d = 2..5, 20 specs, max rel gap {worst:.2e} (<= 1e-7); uniform triangle off 35/(48 pi) by {gap:.2e}"),
    )
}

fn classical_constants() -> Verdict {
    let want = 35.0 / (12.0 * PI * PI);
    let disk = PolySpec::new(2, vec![0.0; 4]).unwrap();
    let syl = sylvester_probability(&disk, &cfg()).unwrap();
    let f0 = expected_fk_poly(&disk, 0, &cfg()).unwrap();
    let (e1, e2) = ((syl - want).abs(), (f0 - (4.0 - want)).abs());
    verdict(
        e1 <= 1e-6 && e2 <= 1e-6,
        format!("Sylvester {syl:.9} (off {e1:.1e}), E f_0 {f0:.9} (off {e2:.1e}), tol 1e-6"),
    )
}

/// Worst relative gap to the binomial limit over the listed quantities.
fn wendel_gap(apex: f64, point: f64) -> (f64, String) {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for (n, d) in [(4usize, 2usize), (5, 3), (6, 3)] {
        let spec = ConeSpec::new(d, apex, vec![point; n]).unwrap();
        let mut check = |name: String, got: f64, q: WendelQuantity| {
            let want = ratio_to_f64(&wendel_reference(n, d, q).unwrap());
            let gap = (got - want).abs() / want;
            if gap > worst {
                worst = gap;
                at = format!("{name} at (n, d) = ({n}, {d}): {got:.4} vs {want:.4}");
            }
        };
        check(
            "prob_proper".into(),
            prob_proper(&spec, &cfg()).unwrap(),
            WendelQuantity::ProbProper,
        );
        for k in 0..d {
            check(
                format!("f_{k}"),
                expected_fk_cone(&spec, k, &cfg()).unwrap(),
                WendelQuantity::Fk(k),
            );
            check(
                format!("upsilon_{k}"),
                expected_upsilon(&spec, k, &cfg()).unwrap(),
                WendelQuantity::Upsilon(k),
            );
        }
        check(
            format!("upsilon_{d}"),
            expected_upsilon(&spec, d, &cfg()).unwrap(),
            WendelQuantity::UpsilonD,
        );
    }
    (worst, at)
}

fn wendel_convergence() -> Verdict {
    let (literal, at) = wendel_gap(1e6, 1e6);
    let (apex_only, _) = wendel_gap(1e6, 0.0);
    verdict(
        literal <= 0.01,
        format!(
            "all betas 1e6: max rel gap {literal:.3} (<= 0.01), worst {at}; apex beta 1e6 with point betas 0: max rel gap {apex_only:.1e}"
        ),
    )
}

fn theta_limit() -> Verdict {
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let ny = r.random_range(0..=3);
        let nz = r.random_range(0..=3);
        let y = uniform_vec(&mut r, ny, 0.0, 5.0);
        let z = uniform_vec(&mut r, nz, 0.0, 5.0);
        let want = 0.5f64.powi((ny + nz) as i32);
        worst = worst.max((theta_value(1e4, &y, &z) - want).abs() / want);
    }
    verdict(worst <= 0.01, format!("5 multisets, max rel gap {worst:.2e} (<= 0.01)"))
}

fn monte_carlo_concordance() -> Verdict {
    let specs: [(&str, &str, &str); 6] = [
        ("2", "0,1,-0.5,2", "0.5"),
        ("2", "-1,0.5,0,3,1", "1"),
        ("2", "2,-0.5,0,1,-1,0.5", "0"),
        ("3", "0,1,-0.5,2", "0.5"),
        ("3", "0,1,-0.5,2,0.5", "0.5"),
        ("3", "-0.5,0,1,2,0.5,-1", "1"),
    ];
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut all = true;
    let mut count = 0;
    for (d, betas, apex) in specs {
        let out = betageom::run([
            "verify",
            "--d",
            d,
            "--betas",
            betas,
            "--apex-beta",
            apex,
            "--samples",
            "200000",
            "--seed",
            "1",
        ]);
        let report: serde_json::Value = match serde_json::from_str(&out.stdout) {
            Ok(v) => v,
            Err(_) => {
                all = false;
                notes.push(format!("d = {d}, betas {betas}: exit {} {}", out.code, out.stderr.trim()));
                continue;
            }
        };
        let items = report["comparisons"].as_array().cloned().unwrap_or_default();
        count += items.len();
        for c in &items {
            if c["discordant"] != false {
                notes.push(format!("d = {d}, betas {betas}: {} z = {}", c["quantity"], c["z_score"]));
            }
        }
        all &= out.code == 0 && report["passed"] == true;
    }
    let secs = start.elapsed().as_secs_f64();
    let mut detail = format!("6 specs, {count} comparisons at 2e5 replications, {secs:.0} s (<= 600 s)");
    if !notes.is_empty() {
        detail.push_str("; ");
        detail.push_str(&notes.join("; "));
    }
    verdict(all && secs <= 600.0, detail)
}

fn kubota() -> Verdict {
    let mut r = rng(11);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let d = r.random_range(3..=5usize);
        let n = r.random_range(d + 1..=d + 3);
        let k = r.random_range(2..d);
        let betas = uniform_vec(&mut r, n, -1.0, 3.0);
        let spec = PolySpec::new(d, betas.clone()).unwrap();
        let direct = expected_intrinsic_volume(&spec, k, &cfg()).unwrap();
        let shift = (d - k) as f64 / 2.0;
        let reduced = PolySpec::new(k, betas.iter().map(|b| b + shift).collect()).unwrap();
        let flag = binomial(d, k) * kappa(d) / (kappa(k) * kappa(d - k));
        let via_volume = flag * expected_volume(&reduced, &cfg()).unwrap();
        worst = worst.max((direct - via_volume).abs() / via_volume);
    }
    verdict(
        worst <= 1e-7,
        format!("10 specs, d = 3..5, k >= 2, max rel gap {worst:.2e} (<= 1e-7)"),
    )
}

fn reproducibility() -> Verdict {
    let runs: [&[&str]; 2] = [
        &[
            "simulate",
            "--model",
            "cone",
            "--d",
            "3",
            "--betas",
            "0,1,-0.5,2,0.5",
            "--apex-beta",
            "0.5",
            "--samples",
            "10000",
            "--seed",
            "12",
        ],
        &[
            "simulate",
            "--model",
            "polytope",
            "--d",
            "2",
            "--betas",
            "-1,0,1,2,0.5",
            "--samples",
            "10000",
            "--seed",
            "12",
        ],
    ];
    let mut same = true;
    for args in runs {
        let once = Command::new(env!("CARGO_BIN_EXE_betageom")).args(args).output().unwrap();
        let twice = Command::new(env!("CARGO_BIN_EXE_betageom")).args(args).output().unwrap();
        same &= once.status.success() && once.stdout == twice.stdout && !once.stdout.is_empty();
    }
    verdict(
        same,
        "cone and polytope simulate, two processes each, byte comparison of stdout".into(),
    )
}

type Check = fn() -> Verdict;

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("theta identity suite", theta_identities),
        ("a/b recurrences", recurrences),
        ("periodicity and closed values", periodicity),
        ("special a-values", special_values),
        ("Ext dual path", ext_dual_path),
        ("simplex volume triple agreement", simplex_volume),
        ("classical constants", classical_constants),
        ("Wendel convergence", wendel_convergence),
        ("theta large-x limit", theta_limit),
        ("Monte Carlo concordance", monte_carlo_concordance),
        ("Kubota consistency", kubota),
        ("simulate reproducibility", reproducibility),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {}", i + 1, v.detail);
        if !v.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
