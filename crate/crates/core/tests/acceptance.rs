//! One line per acceptance criterion. Every comparison is exact: the pinned
//! tolerance is zero, and pass means `expected == actual` on every case.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mp2_core::characters::{MultCharacter, UnitCharacter};
use mp2_core::checks::{
    cocycle_suite, cosets_suite, gauss_suite, hilbert_suite, ps_suite, rs_sum_suite, splitting_suite, steinberg_suite, theta_suite,
    weil_index_suite, weil_suite, CheckConfig, Grid,
};
use mp2_core::cosets::dim_fixed_ps_oracle;
use mp2_core::report::Report;

const TOLERANCE: &str = "exact";

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Option<Duration>,
}

fn cfg(primes: &[u64], grid: Grid) -> CheckConfig {
    CheckConfig { primes: primes.to_vec(), grid, ..Default::default() }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed())
}

fn counts(r: &Report, suffix: &str) -> (usize, usize) {
    let sel: Vec<_> = r.cases.iter().filter(|c| c.key.ends_with(suffix)).collect();
    (sel.len(), sel.iter().filter(|c| c.pass).count())
}

fn first_failures(rs: &[&Report]) -> String {
    let f: Vec<String> =
        rs.iter().flat_map(|r| r.failures()).take(3).map(|c| format!("{}: {} vs {}", c.key, c.expected, c.actual)).collect();
    if f.is_empty() {
        String::new()
    } else {
        format!("; first failures: {}", f.join(" | "))
    }
}

fn gauss_lines() -> Vec<Line> {
    let (r, t) = timed(|| gauss_suite(&cfg(&[3, 5, 7], Grid::full())));
    let (ng, pg) = counts(&r, "/g");
    let (nh, ph) = counts(&r, "/h");
    let (np, pp) = counts(&r, "/hpair");
    let notes: Vec<&str> = r.cases.iter().filter_map(|c| c.note.as_deref()).collect();
    let psi = notes.iter().filter(|n| n.ends_with(": psi")).count();
    let psi_xi = notes.iter().filter(|n| n.ends_with(": psi_xi")).count();
    vec![
        Line {
            id: 1,
            name: "Gauss sums g: closed form vs summation",
            pass: ng > 0 && ng == pg && nh == ph && r.truncated.is_none(),
            detail: format!(
                "{pg}/{ng} g cases, {ph}/{nh} determined h cases, p in {{3,5,7}}, c(chi)<=3, c(psi) in [-1,3]{}",
                first_failures(&[&r])
            ),
            elapsed: t,
            budget: Some(Duration::from_secs(10)),
        },
        Line {
            id: 2,
            name: "h-pair identity",
            pass: np > 0 && np == pp,
            detail: format!("{pp}/{np} pairs; c(chi)=c(psi)>=2 nonzero twist: psi {psi}, psi_xi {psi_xi}"),
            elapsed: t,
            budget: Some(Duration::from_secs(10)),
        },
    ]
}

fn hilbert_weil_line() -> Line {
    let ((h, w), t) = timed(|| {
        let c = cfg(&[3, 5, 7], Grid::default_grid());
        (hilbert_suite(&c), weil_index_suite(&c))
    });
    Line {
        id: 3,
        name: "Hilbert symbol and Weil-index identities",
        pass: h.pass() && w.pass() && h.summary.total == 48 && w.summary.total > 0,
        detail: format!(
            "hilbert {}/{} class pairs, weil-index {}/{} identity groups (psi^0, psi^1){}",
            h.summary.passed,
            h.summary.total,
            w.summary.passed,
            w.summary.total,
            first_failures(&[&h, &w])
        ),
        elapsed: t,
        budget: Some(Duration::from_secs(30)),
    }
}

fn metaplectic_line() -> Line {
    let ((c, s), t) = timed(|| {
        let base = cfg(&[3, 5], Grid::default_grid());
        (
            cocycle_suite(&CheckConfig { samples: Some(1000), seed: 7, ..base.clone() }),
            splitting_suite(&CheckConfig { samples: Some(500), seed: 11, ..base }),
        )
    });
    let samples = |r: &Report| r.cases.iter().map(|c| c.inputs["samples"].as_u64().unwrap_or(0)).min().unwrap_or(0);
    Line {
        id: 4,
        name: "Kubota cocycle associativity and splitting homomorphism",
        pass: c.pass() && s.pass() && c.summary.total == 2 && s.summary.total == 4 && samples(&c) >= 1000 && samples(&s) >= 500,
        detail: format!(
            "cocycle {} triples x {} primes, splitting {} pairs x {} (p, eps) incl. path-independence checks, zero failures required{}",
            samples(&c),
            c.summary.total,
            samples(&s),
            s.summary.total,
            first_failures(&[&c, &s])
        ),
        elapsed: t,
        budget: None,
    }
}

fn cosets_line() -> Line {
    let (r, t) = timed(|| cosets_suite(&CheckConfig { m_max: Some(3), ..cfg(&[3, 5], Grid::default_grid()) }));
    let counts: Vec<String> = r.cases.iter().map(|c| format!("{}={}", c.key, c.actual["count"])).collect();
    let pinned = r.cases.iter().all(|c| {
        let m = c.inputs["m"].as_u64().unwrap();
        c.actual["count"].as_u64() == Some(if m == 0 { 1 } else { 2 * m })
    });
    Line {
        id: 5,
        name: "double-coset oracle",
        pass: r.pass() && pinned && r.summary.total == 8,
        detail: format!("{} (reps complete and pairwise inequivalent for both eps){}", counts.join(" "), first_failures(&[&r])),
        elapsed: t,
        budget: Some(Duration::from_secs(60)),
    }
}

fn ps_line() -> Line {
    let (r, t) = timed(|| ps_suite(&CheckConfig { m_max: Some(3), ..cfg(&[3, 5], Grid::default_grid()) }));
    let mut seq_ok = true;
    let mut seqs = Vec::new();
    for p in [3, 5] {
        for eps in 0..2 {
            let mu = MultCharacter::unramified(p);
            let s: Vec<u32> = (0..=3).map(|m| dim_fixed_ps_oracle(p, &mu, eps, &UnitCharacter::trivial(p), m).unwrap()).collect();
            seq_ok &= s == [1, 2, 4, 6];
            seqs.push(format!("{s:?}"));
        }
    }
    Line {
        id: 6,
        name: "principal-series dimensions vs coset oracle",
        pass: r.pass() && r.summary.total > 0 && seq_ok,
        detail: format!("{}/{} cases, unramified sequence {}{}", r.summary.passed, r.summary.total, seqs[0], first_failures(&[&r])),
        elapsed: t,
        budget: None,
    }
}

fn weil_line() -> Line {
    let (r, t) = timed(|| weil_suite(&CheckConfig { m_max: Some(6), ..cfg(&[3, 5], Grid::default_grid()) }));
    Line {
        id: 7,
        name: "even-Weil dimensions vs Schroedinger-model oracle",
        pass: r.pass() && r.summary.total > 0,
        detail: format!("{}/{} cases, 4 classes, c(eta)<=2, m<=6{}", r.summary.passed, r.summary.total, first_failures(&[&r])),
        elapsed: t,
        budget: Some(Duration::from_secs(120)),
    }
}

fn steinberg_line() -> Line {
    let (r, t) = timed(|| steinberg_suite(&CheckConfig { m_max: Some(20), ..cfg(&[3, 5], Grid::full()) }));
    Line {
        id: 8,
        name: "Steinberg = principal series - even Weil",
        pass: r.pass() && r.summary.total > 0,
        detail: format!("{}/{} (chi, eps, eta) rows, m<=20{}", r.summary.passed, r.summary.total, first_failures(&[&r])),
        elapsed: t,
        budget: None,
    }
}

fn rs_line() -> Line {
    let (r, t) = timed(|| rs_sum_suite(&CheckConfig { m_max: Some(6), ..cfg(&[3, 5], Grid::full()) }));
    Line {
        id: 9,
        name: "newform sum rule and oldform bounds",
        pass: r.pass() && r.summary.total > 0,
        detail: format!(
            "{}/{} (repr, eps, eta) cases, m<=6; {} outside the formulas' eta ranges reported as skipped{}",
            r.summary.passed,
            r.summary.total,
            r.summary.skipped,
            first_failures(&[&r])
        ),
        elapsed: t,
        budget: None,
    }
}

fn theta_line() -> Line {
    let (r, t) = timed(|| theta_suite(&cfg(&[3, 5], Grid::full())));
    let odd: Vec<_> = r.cases.iter().filter(|c| c.key.contains("odd-weil")).collect();
    let odd_ok = !odd.is_empty()
        && odd.iter().all(|c| c.pass && c.actual["match"] == false && c.actual["c_eps_1"] == "2" && c.actual["theta_conductor"] == "1");
    Line {
        id: 10,
        name: "theta conductor matching",
        pass: r.pass() && odd_ok,
        detail: format!(
            "{}/{} generic z=+1 cases incl. {} odd-Weil 2-vs-1 expected mismatches; {} skipped (non-generic, z=-1, unknown genericity){}",
            r.summary.passed,
            r.summary.total,
            odd.len(),
            r.summary.skipped,
            first_failures(&[&r])
        ),
        elapsed: t,
        budget: None,
    }
}

fn main() -> ExitCode {
    let mut lines = gauss_lines();
    lines.push(hilbert_weil_line());
    lines.push(metaplectic_line());
    lines.push(cosets_line());
    lines.push(ps_line());
    lines.push(weil_line());
    lines.push(steinberg_line());
    lines.push(rs_line());
    lines.push(theta_line());
    let mut all = true;
    for l in &lines {
        let in_budget = l.budget.is_none_or(|b| l.elapsed <= b);
        let pass = l.pass && in_budget;
        all &= pass;
        let budget = l.budget.map_or(String::new(), |b| format!(" budget {}s", b.as_secs()));
        println!(
            "criterion {:>2} {} [{}] tolerance={} time={:.2}s{}: {}",
            l.id,
            if pass { "PASS" } else { "FAIL" },
            l.name,
            TOLERANCE,
            l.elapsed.as_secs_f64(),
            budget,
            l.detail
        );
    }
    println!("acceptance: {}", if all { "all criteria pass" } else { "FAILED" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
