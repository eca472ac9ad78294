//! Bundled fixtures and the named reproduction scenarios.

use std::fmt;
use std::sync::Arc;

use crate::bijections::{
    case_label, exchange_segments, f_map, make_swap_context, problem_cells, reversal_coupling, swap_with_fillings,
};
use crate::chains::{brute_force_longest, longest_chain, ne, se, Direction};
use crate::distribution::{distribution, DistributionKind, DistributionPolynomial};
use crate::filling::{enumerate, FillConstraint, Filling};
use crate::io::{parse_collection, Document};
use crate::polyomino::Polyomino;
use crate::verify::{verify, FillingClass, Property, Report, VerifyParams};

const FIXTURES: &[(&str, &str)] = &[
    ("fig1a", include_str!("../fixtures/fig1a.txt")),
    ("fig1b", include_str!("../fixtures/fig1b.txt")),
    ("fig3", include_str!("../fixtures/fig3.txt")),
    ("fig8", include_str!("../fixtures/fig8.txt")),
    ("fig9_m", include_str!("../fixtures/fig9_m.txt")),
    ("fig9_n", include_str!("../fixtures/fig9_n.txt")),
    ("fig10", include_str!("../fixtures/fig10.txt")),
    ("fig11_left", include_str!("../fixtures/fig11_left.txt")),
    ("fig11_right", include_str!("../fixtures/fig11_right.txt")),
    ("fig12", include_str!("../fixtures/fig12.txt")),
    ("m1", include_str!("../fixtures/m1.txt")),
    ("m2", include_str!("../fixtures/m2.txt")),
    ("m3", include_str!("../fixtures/m3.txt")),
];

pub const SCENARIOS: [&str; 7] = ["fig3", "fig8", "fig9", "fig10", "fig11", "fig12", "example52"];

/// Restricted `(ne, se)` distribution of the 6×6 square without its cell
/// (1,1); the same for the cell (2,1) removed.
pub const EXAMPLE52_M1: &str = "1*x^1*y^5 + 50*x^2*y^3 + 72*x^2*y^4 + 8*x^2*y^5 + 50*x^3*y^2 + 242*x^3*y^3 \
     + 48*x^3*y^4 + 72*x^4*y^2 + 48*x^4*y^3 + 1*x^5*y^1 + 8*x^5*y^2";

/// Restricted `(ne, se)` distribution of the 6×6 square without the cell (3,1).
pub const EXAMPLE52_M3: &str = "1*x^1*y^5 + 50*x^2*y^3 + 72*x^2*y^4 + 8*x^2*y^5 + 49*x^3*y^2 + 243*x^3*y^3 \
     + 48*x^3*y^4 + 73*x^4*y^2 + 47*x^4*y^3 + 1*x^5*y^1 + 8*x^5*y^2";

/// Restricted `ne` distribution of the left shape of fig11.
pub const FIG11_LEFT: &str = "1*q^1 + 37*q^2 + 31*q^3 + 3*q^4";

/// The printed terms of degree two and higher for the right shape of fig11.
pub const FIG11_RIGHT_UPPER: &str = "36*q^2 + 32*q^3 + 3*q^4";

pub const FIG8_LABELS: [(usize, usize); 9] = [(1, 3), (2, 2), (2, 2), (2, 2), (2, 2), (2, 2), (2, 2), (3, 2), (2, 1)];
pub const FIG9_M_LABELS: [(usize, usize); 9] = [(1, 3), (2, 2), (2, 2), (2, 2), (2, 2), (2, 2), (2, 2), (3, 2), (2, 1)];
pub const FIG9_N_LABELS: [(usize, usize); 9] = [(2, 3), (1, 2), (2, 2), (2, 2), (2, 2), (2, 2), (2, 2), (3, 1), (2, 2)];

/// Raw text of a bundled fixture.
pub fn fixture(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn fixture_names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

/// Parsed documents of a bundled fixture.
pub fn load(name: &str) -> Vec<Document> {
    let text = fixture(name).unwrap_or_else(|| panic!("no fixture named {name}"));
    parse_collection(text).expect("bundled fixtures parse")
}

pub fn load_shape(name: &str) -> Arc<Polyomino> {
    load(name)[0].shape.clone()
}

pub fn load_fillings(name: &str) -> Vec<Filling> {
    load(name)
        .into_iter()
        .map(|d| d.filling.expect("fixture holds fillings"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioReport {
    pub name: String,
    pub lines: Vec<String>,
    pub pass: bool,
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}", self.name)?;
        for l in &self.lines {
            writeln!(f, "  {l}")?;
        }
        write!(f, "{}", if self.pass { "PASS" } else { "FAIL" })
    }
}

struct Builder {
    lines: Vec<String>,
    pass: bool,
}

impl Builder {
    fn new() -> Self {
        Builder {
            lines: Vec::new(),
            pass: true,
        }
    }

    fn info(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn check(&mut self, ok: bool, line: impl Into<String>) {
        self.pass &= ok;
        self.lines
            .push(format!("[{}] {}", if ok { "ok" } else { "MISMATCH" }, line.into()));
    }

    fn finish(self, name: &str) -> ScenarioReport {
        ScenarioReport {
            name: name.to_string(),
            lines: self.lines,
            pass: self.pass,
        }
    }
}

/// Runs a named scenario; `None` for an unknown name.
pub fn reproduce(name: &str) -> Option<ScenarioReport> {
    let mut b = Builder::new();
    match name {
        "fig3" => fig3(&mut b),
        "fig8" => fig8(&mut b),
        "fig9" => fig9(&mut b),
        "fig10" => fig10(&mut b),
        "fig11" => fig11(&mut b),
        "fig12" => fig12(&mut b),
        "example52" => example52(&mut b),
        _ => return None,
    }
    Some(b.finish(name))
}

fn fig3(b: &mut Builder) {
    let f = &load_fillings("fig3")[0];
    let ne_chain = longest_chain(f, Direction::Ne);
    let se_chain = longest_chain(f, Direction::Se);
    let witness = ne_chain.witness.as_ref().map(|c| c.to_string()).unwrap_or_default();
    b.check(ne_chain.size == 3, format!("ne = {}", ne_chain.size));
    b.check(
        witness == "(5,2),(3,4),(2,5)",
        format!("least maximum ne-chain {witness}"),
    );
    b.info(format!(
        "se = {} with least witness {}",
        se_chain.size,
        se_chain.witness.map(|c| c.to_string()).unwrap_or_default()
    ));
    let oracle_ne = brute_force_longest(f, Direction::Ne).ok();
    let oracle_se = brute_force_longest(f, Direction::Se).ok();
    b.check(
        oracle_ne == Some(ne_chain.size) && oracle_se == Some(se_chain.size),
        format!("brute force agrees: ne {oracle_ne:?}, se {oracle_se:?}"),
    );
}

fn labels(fillings: &[Filling]) -> Vec<(usize, usize)> {
    fillings.iter().map(|f| (ne(f), se(f))).collect()
}

fn sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let mut v = v.to_vec();
    v.sort();
    v
}

fn fig8_constraint() -> FillConstraint {
    FillConstraint::RowColSums {
        rows: vec![1; 4],
        cols: vec![2, 1, 1],
    }
}

/// Checks a nine-filling fixture against its labels and against enumeration.
fn labelled_family(b: &mut Builder, name: &str, expected: &[(usize, usize)]) -> Option<DistributionPolynomial> {
    let fixtures = load_fillings(name);
    let shape = fixtures[0].shape_arc().clone();
    let found = labels(&fixtures);
    b.check(found == expected, format!("{name}: fixture labels {found:?}"));
    let all: Vec<Filling> = enumerate(shape.clone(), &fig8_constraint()).ok()?.collect();
    b.check(
        all.len() == 9,
        format!("{name}: {} fillings with r=(1,1,1,1), c=(2,1,1)", all.len()),
    );
    b.check(
        sorted(&all) == sorted(&fixtures),
        format!("{name}: fixture lists every filling"),
    );
    b.check(
        sorted(&labels(&all)) == sorted(expected),
        format!("{name}: label multiset matches"),
    );
    let joint = distribution(shape, &fig8_constraint(), DistributionKind::Bivariate).ok()?;
    b.info(format!("{name}: joint {joint}"));
    Some(joint)
}

fn fig8(b: &mut Builder) {
    let Some(joint) = labelled_family(b, "fig8", &FIG8_LABELS) else {
        b.check(false, "enumeration failed");
        return;
    };
    b.check(
        !joint.is_symmetric() && joint.coefficient(1, 3) == 1 && joint.coefficient(3, 1) == 0,
        "joint distribution is not symmetric: x y^3 present, x^3 y absent",
    );
}

fn fig9(b: &mut Builder) {
    let m = labelled_family(b, "fig9_m", &FIG9_M_LABELS);
    let n = labelled_family(b, "fig9_n", &FIG9_N_LABELS);
    let (Some(m), Some(n)) = (m, n) else {
        b.check(false, "enumeration failed");
        return;
    };
    let expected: DistributionPolynomial = "q + 7*q^2 + q^3".parse().expect("valid polynomial");
    b.check(m.marginal() == expected, format!("M marginal {}", m.marginal()));
    b.check(n.marginal() == expected, format!("N marginal {}", n.marginal()));
    b.check(m != n, "joint distributions differ");
    let shape = load_shape("fig9_m");
    let params = VerifyParams {
        swap: Some(2),
        ..VerifyParams::default()
    };
    match verify(Property::Theorem1, &shape, &params) {
        Ok(Report::Pass { checked }) => b.check(true, format!("theorem1 holds on all {checked} fillings for swap 2")),
        other => b.check(false, format!("theorem1: {other:?}")),
    }
}

fn quadruple(b: &mut Builder, name: &str, expected: [usize; 4]) -> Option<Vec<Filling>> {
    let q = load_fillings(name);
    let found: Vec<usize> = q.iter().map(ne).collect();
    b.check(found == expected, format!("ne(M, M', N, N') = {found:?}"));
    (q.len() == 4).then_some(q)
}

fn fig10(b: &mut Builder) {
    let Some(q) = quadruple(b, "fig10", [3, 4, 4, 4]) else {
        return;
    };
    let ctx = make_swap_context(q[0].shape_arc().clone(), 3).expect("valid swap");
    b.check(
        exchange_segments(&ctx, &q[0]).ok().as_ref() == Some(&q[1]),
        "M' exchanges the segments of M",
    );
    b.check(
        swap_with_fillings(&ctx, &q[0]).ok().as_ref() == Some(&q[2]),
        "N = M with rows 3, 4 swapped",
    );
    b.check(f_map(&ctx, &q[0]).ok().as_ref() == Some(&q[3]), "N' = f(M)");
    let params = VerifyParams {
        swap: Some(3),
        class: FillingClass::Single(q[0].clone()),
        relaxed: true,
    };
    match verify(Property::CouplingLemma, &q[0].shape_arc().clone(), &params) {
        Ok(Report::Fail { message, .. }) => b.check(
            true,
            format!("coupling lemma fails with several ones per row: {message}"),
        ),
        other => b.check(false, format!("coupling lemma: {other:?}")),
    }
}

fn fig11(b: &mut Builder) {
    let left = load_shape("fig11_left");
    let right = load_shape("fig11_right");
    b.check(
        make_swap_context(left.clone(), 1).is_err(),
        "rows 1, 2 of the left shape do not form a valid swap",
    );
    let dist = |s: &Arc<Polyomino>| distribution(s.clone(), &FillConstraint::Restricted, DistributionKind::Univariate);
    let (Ok(l), Ok(r)) = (dist(&left), dist(&right)) else {
        b.check(false, "enumeration failed");
        return;
    };
    b.check(
        l.total() == 72 && r.total() == 72,
        format!("{} and {} restricted fillings", l.total(), r.total()),
    );
    b.check(l.to_string() == FIG11_LEFT, format!("left: {l}"));
    let upper: DistributionPolynomial = FIG11_RIGHT_UPPER.parse().expect("valid polynomial");
    let printed_upper = (2..=4).all(|a| r.coefficient(a, 0) == upper.coefficient(a, 0));
    b.check(printed_upper, format!("right: {r}"));
    let linear = r.coefficient(1, 0);
    b.info(format!(
        "right: degree-1 coefficient {linear}; reading the printed p as x {}, as an unknown constant {}",
        if linear == 1 { "agrees" } else { "disagrees" },
        if r.coefficient(0, 0) > 0 { "agrees" } else { "disagrees" }
    ));
    b.check(r.total() == upper.total() + linear, "no other terms");
    b.check(l != r, "the two distributions differ");
}

fn fig12(b: &mut Builder) {
    let Some(q) = quadruple(b, "fig12", [2, 3, 3, 3]) else {
        return;
    };
    let ctx = make_swap_context(q[0].shape_arc().clone(), 2).expect("valid swap");
    b.check(
        reversal_coupling(&ctx, &q[0]).ok().as_ref() == Some(&q[1]),
        "M' reverses the segment patterns of M",
    );
    b.check(
        swap_with_fillings(&ctx, &q[0]).ok().as_ref() == Some(&q[2]),
        "N = M with rows 2, 3 swapped",
    );
    b.check(
        swap_with_fillings(&ctx, &q[1]).ok().as_ref() == Some(&q[3]),
        "N' = M' with rows 2, 3 swapped",
    );
    let label = case_label(&ctx, &q[0]);
    let image = f_map(&ctx, &q[0]).map(|f| ne(&f)).unwrap_or(0);
    b.check(
        label == Ok(crate::bijections::CaseLabel::II),
        format!("ne(f(M)) = {image}: case {label:?}"),
    );
    if let Ok(report) = problem_cells(&ctx, &q[0]) {
        let cells: Vec<String> = report.problem_cells.iter().map(|c| c.to_string()).collect();
        b.info(format!("problem cells {}", cells.join(",")));
    }
    let exchanged = exchange_segments(&ctx, &q[0]).map(|f| ne(&f)).unwrap_or(0);
    b.info(format!("segment exchange of M has ne = {exchanged}"));
}

fn example52(b: &mut Builder) {
    let m1: DistributionPolynomial = EXAMPLE52_M1.parse().expect("valid polynomial");
    let m3: DistributionPolynomial = EXAMPLE52_M3.parse().expect("valid polynomial");
    for (name, expected, symmetric) in [("m1", &m1, true), ("m2", &m1, true), ("m3", &m3, false)] {
        let shape = load_shape(name);
        let Ok(p) = distribution(shape, &FillConstraint::Restricted, DistributionKind::Bivariate) else {
            b.check(false, format!("{name}: enumeration failed"));
            continue;
        };
        b.info(format!("{name}: {p}"));
        b.check(p.total() == 600, format!("{name}: {} restricted fillings", p.total()));
        b.check(&p == expected, format!("{name}: coefficients match"));
        b.check(
            p.is_symmetric() == symmetric,
            format!("{name}: {}symmetric in x and y", if symmetric { "" } else { "not " }),
        );
    }
}
