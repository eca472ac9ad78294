//! Acceptance gate: one PASS/FAIL line per criterion, all comparisons exact.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use moonchain::bijections::{exchange_segments, f_map, reversal_coupling, swap_with_fillings};
use moonchain::chains::{brute_force_longest, compatible, is_valid_chain, longest_chain};
use moonchain::scenarios::{
    load, load_fillings, load_shape, EXAMPLE52_M1, EXAMPLE52_M3, FIG11_LEFT, FIG11_RIGHT_UPPER, FIG8_LABELS,
    FIG9_M_LABELS, FIG9_N_LABELS,
};
use moonchain::{
    distribution, enumerate, make_swap_context, ne, se, sweep, Cell, Direction, DistributionKind,
    DistributionPolynomial, FillConstraint, Filling, Polyomino, Property, SweepConfig, SweepReport,
};

type Outcome = Result<String, String>;

fn check(ok: bool, pass: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if ok {
        Ok(pass.into())
    } else {
        Err(fail.into())
    }
}

fn poly(text: &str) -> DistributionPolynomial {
    text.parse().expect("valid polynomial")
}

fn criterion1() -> Outcome {
    let m1 = poly(EXAMPLE52_M1);
    let m3 = poly(EXAMPLE52_M3);
    for (name, expected) in [("m1", &m1), ("m2", &m1), ("m3", &m3)] {
        let p = distribution(
            load_shape(name),
            &FillConstraint::Restricted,
            DistributionKind::Bivariate,
        )
        .map_err(|e| e.to_string())?;
        if p.total() != 600 {
            return Err(format!("{name}: {} fillings, expected 600", p.total()));
        }
        if &p != expected {
            return Err(format!("{name}: got {p}"));
        }
    }
    let spot = [
        (&m1, (3, 3), 242),
        (&m3, (3, 3), 243),
        (&m3, (4, 2), 73),
        (&m3, (4, 3), 47),
        (&m3, (3, 2), 49),
    ];
    let ok = spot.iter().all(|(p, (a, b), c)| p.coefficient(*a, *b) == *c);
    check(
        ok,
        "600 fillings each; M1 = M2 symmetric with 242 x^3y^3; M3 has 243, 73, 47, 49",
        "spot coefficients differ",
    )
}

fn criterion2() -> Outcome {
    let dist = |name| {
        distribution(
            load_shape(name),
            &FillConstraint::Restricted,
            DistributionKind::Univariate,
        )
        .map_err(|e| e.to_string())
    };
    let left = dist("fig11_left")?;
    let right = dist("fig11_right")?;
    if left.total() != 72 || right.total() != 72 {
        return Err(format!("{} and {} fillings", left.total(), right.total()));
    }
    if left != poly(FIG11_LEFT) {
        return Err(format!("left: {left}"));
    }
    let upper = poly(FIG11_RIGHT_UPPER);
    let printed_match = (2..=4).all(|a| right.coefficient(a, 0) == upper.coefficient(a, 0));
    let linear = right.coefficient(1, 0);
    let rest = right.total() == upper.total() + linear;
    check(
        printed_match && rest,
        format!("left {left}; right {right}; degree-1 coefficient {linear}"),
        format!("right: {right}"),
    )
}

fn labelled(name: &str, expected: &[(usize, usize)]) -> Result<DistributionPolynomial, String> {
    let fixtures = load_fillings(name);
    let shape = fixtures[0].shape_arc().clone();
    let constraint = FillConstraint::RowColSums {
        rows: vec![1; 4],
        cols: vec![2, 1, 1],
    };
    let all: Vec<Filling> = enumerate(shape.clone(), &constraint)
        .map_err(|e| e.to_string())?
        .collect();
    if all.len() != 9 {
        return Err(format!("{name}: {} fillings", all.len()));
    }
    let mut labels: Vec<(usize, usize)> = all.iter().map(|f| (ne(f), se(f))).collect();
    let mut want = expected.to_vec();
    labels.sort();
    want.sort();
    if labels != want {
        return Err(format!("{name}: labels {labels:?}"));
    }
    let fixture_labels: Vec<(usize, usize)> = fixtures.iter().map(|f| (ne(f), se(f))).collect();
    if fixture_labels != expected {
        return Err(format!("{name}: fixture labels {fixture_labels:?}"));
    }
    distribution(shape, &constraint, DistributionKind::Bivariate).map_err(|e| e.to_string())
}

fn criterion3() -> Outcome {
    labelled("fig8", &FIG8_LABELS)?;
    let m = labelled("fig9_m", &FIG9_M_LABELS)?;
    let n = labelled("fig9_n", &FIG9_N_LABELS)?;
    let marginal = poly("q + 7*q^2 + q^3");
    check(
        m.marginal() == marginal && n.marginal() == marginal && m != n,
        "9 fillings each with the printed labels; marginals q + 7q^2 + q^3; joints differ",
        format!(
            "marginals {} / {}; joints equal: {}",
            m.marginal(),
            n.marginal(),
            m == n
        ),
    )
}

fn criterion4() -> Outcome {
    let f = &load_fillings("fig3")[0];
    let chain = longest_chain(f, Direction::Ne);
    let witness = chain.witness.map(|c| c.to_string()).unwrap_or_default();
    let oracle = brute_force_longest(f, Direction::Ne).map_err(|e| e.to_string())?;
    check(
        chain.size == 3 && witness == "(5,2),(3,4),(2,5)" && oracle == 3,
        format!("ne = 3, least witness {witness}, brute force {oracle}"),
        format!("ne = {}, witness {witness}, brute force {oracle}", chain.size),
    )
}

fn criterion5() -> Outcome {
    let q10 = load_fillings("fig10");
    let q12 = load_fillings("fig12");
    let ne10: Vec<usize> = q10.iter().map(ne).collect();
    let ne12: Vec<usize> = q12.iter().map(ne).collect();
    if ne10 != [3, 4, 4, 4] || ne12 != [2, 3, 3, 3] {
        return Err(format!("ne {ne10:?} and {ne12:?}"));
    }
    let c10 = make_swap_context(q10[0].shape_arc().clone(), 3).map_err(|e| e.to_string())?;
    let c12 = make_swap_context(q12[0].shape_arc().clone(), 2).map_err(|e| e.to_string())?;
    let derived = exchange_segments(&c10, &q10[0]).ok().as_ref() == Some(&q10[1])
        && swap_with_fillings(&c10, &q10[0]).ok().as_ref() == Some(&q10[2])
        && f_map(&c10, &q10[0]).ok().as_ref() == Some(&q10[3])
        && reversal_coupling(&c12, &q12[0]).ok().as_ref() == Some(&q12[1])
        && swap_with_fillings(&c12, &q12[0]).ok().as_ref() == Some(&q12[2])
        && swap_with_fillings(&c12, &q12[1]).ok().as_ref() == Some(&q12[3]);
    check(
        derived,
        "fig10 ne = (3,4,4,4); fig12 ne = (2,3,3,3); quadruples rebuilt from M",
        "quadruple members do not follow from M",
    )
}

fn sweep_outcome(report: &SweepReport, props: &[Property]) -> Outcome {
    let mut parts = Vec::new();
    for p in props {
        let s = report
            .summaries
            .iter()
            .find(|s| s.property == *p)
            .ok_or_else(|| format!("{p} not swept"))?;
        if s.violations > 0 {
            let v = s.first_violation.as_ref().expect("violation recorded");
            return Err(format!(
                "{p}: {} violations, first {} {}",
                s.violations, v.unit, v.message
            ));
        }
        parts.push(format!("{p} {} units {} fillings", s.units, s.instances));
    }
    Ok(format!(
        "{} shapes, {} swaps; {}; 0 violations",
        report.shapes,
        report.contexts,
        parts.join(", ")
    ))
}

/// Fillings of the fixtures, plus small classes over the shape-only ones.
fn fixture_fillings() -> Vec<Filling> {
    let mut out = Vec::new();
    for name in moonchain::scenarios::fixture_names() {
        for doc in load(name) {
            match doc.filling {
                Some(f) => out.push(f),
                None => {
                    let shape: Arc<Polyomino> = doc.shape;
                    let mut class: Vec<Filling> = enumerate(shape.clone(), &FillConstraint::TotalOnes(3))
                        .unwrap()
                        .collect();
                    if shape.row_count() == shape.width() {
                        class.extend(enumerate(shape, &FillConstraint::Restricted).unwrap());
                    }
                    out.extend(class);
                }
            }
        }
    }
    out
}

fn fixture_oracle() -> Outcome {
    let fillings = fixture_fillings();
    let mut subsets = 0u64;
    for f in &fillings {
        let shape = f.shape();
        for dir in [Direction::Ne, Direction::Se] {
            let main = longest_chain(f, dir).size;
            let oracle = brute_force_longest(f, dir).map_err(|e| e.to_string())?;
            if main != oracle {
                return Err(format!("{dir}: search {main}, oracle {oracle} on\n{f}"));
            }
            let ones = f.ones();
            if ones.len() > 16 {
                continue;
            }
            for set in 0u32..1 << ones.len() {
                let mut cells: Vec<Cell> = (0..ones.len()).filter(|j| set >> j & 1 == 1).map(|j| ones[j]).collect();
                cells.sort_by_key(|c| (c.col, c.row));
                let pairwise = cells
                    .iter()
                    .enumerate()
                    .all(|(j, &a)| cells[j + 1..].iter().all(|&b| compatible(shape, a, b, dir)));
                let grid = is_valid_chain(shape, &cells, dir).map_err(|e| e.to_string())?;
                if pairwise != grid {
                    return Err(format!("{dir}: pairwise {pairwise}, grid {grid} for {cells:?}"));
                }
                subsets += 1;
            }
        }
    }
    Ok(format!(
        "{} fixture fillings, {subsets} one-cell subsets",
        fillings.len()
    ))
}

fn main() -> ExitCode {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let started = Instant::now();
    let report = sweep(&SweepConfig {
        max_rows: 4,
        max_cols: 4,
        max_ones: None,
        props: vec![
            Property::FInvolution,
            Property::DeltaNeBound,
            Property::Theorem1,
            Property::Theorem2,
            Property::CouplingLemma,
            Property::PairwiseGrid,
            Property::Corollary1Distribution,
            Property::Corollary2Distribution,
        ],
        workers,
    });
    let sweep_secs = started.elapsed().as_secs_f64();

    let criterion8 = || {
        let swept = sweep_outcome(&report, &[Property::PairwiseGrid])?;
        let fixtures = fixture_oracle()?;
        Ok(format!("{swept}; {fixtures}"))
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("1 punctured-square polynomials", criterion1()),
        ("2 layer ne-distributions", criterion2()),
        ("3 labelled fillings", criterion3()),
        ("4 circled chain", criterion4()),
        ("5 counterexample quadruples", criterion5()),
        (
            "6 swap map sweep",
            sweep_outcome(
                &report,
                &[Property::FInvolution, Property::DeltaNeBound, Property::Theorem1],
            ),
        ),
        (
            "7 sparse-row sweep",
            sweep_outcome(&report, &[Property::Theorem2, Property::CouplingLemma]),
        ),
        ("8 oracle equivalence", criterion8()),
        (
            "9 transported distributions",
            sweep_outcome(
                &report,
                &[Property::Corollary1Distribution, Property::Corollary2Distribution],
            ),
        ),
    ];

    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("sweep of the 4x4 box took {sweep_secs:.1}s on {workers} workers");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
