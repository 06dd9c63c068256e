//! Comparison of two computational routes to the same quantity, with a
//! per-term breakdown when they disagree.

use serde::{Deserialize, Serialize};

pub const DEFAULT_ROUTE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Agree,
    /// The disagreement is carried entirely by the listed terms.
    Isolated { terms: Vec<String> },
    Unexplained,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDiff {
    pub term: String,
    /// Largest component magnitude along route A and route B.
    pub route_a: f64,
    pub route_b: f64,
    /// Largest componentwise |A - B| for this term.
    pub diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyCheck {
    pub name: String,
    pub route_a: String,
    pub route_b: String,
    pub tol: f64,
    pub max_diff: f64,
    pub outcome: Outcome,
    pub terms: Vec<TermDiff>,
    /// True when the outcome matches a known, documented discrepancy.
    pub documented: bool,
}

impl ConsistencyCheck {
    pub fn agrees(&self) -> bool {
        self.outcome == Outcome::Agree
    }

    /// Counts as a failure: unexplained, or isolated but not documented, or
    /// any disagreement when `strict`.
    pub fn is_failure(&self, strict: bool) -> bool {
        match self.outcome {
            Outcome::Agree => false,
            Outcome::Unexplained => true,
            Outcome::Isolated { .. } => strict || !self.documented,
        }
    }

    pub fn summary(&self) -> String {
        match &self.outcome {
            Outcome::Agree => format!("{}: agree (max diff {:.3e})", self.name, self.max_diff),
            Outcome::Isolated { terms } => format!(
                "{}: differ by {:.3e}, isolated to [{}]{}",
                self.name,
                self.max_diff,
                terms.join(", "),
                if self.documented { " (documented)" } else { "" }
            ),
            Outcome::Unexplained => {
                format!("{}: differ by {:.3e}, unexplained", self.name, self.max_diff)
            }
        }
    }
}

/// One term of a route decomposition; both slices flatten the same shape.
pub struct RouteTerm<'a> {
    pub name: &'a str,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Known disagreements between a contraction route and a closed display:
/// `(check name, isolated term)`.
pub const KNOWN_DISCREPANCIES: &[(&str, &str, &str)] = &[(
    "family_scalar",
    "torsion_quadratic",
    "closed scalar display carries the torsion quadratic with the opposite sign \
     to the contraction of the Ricci family (difference 2(v'+w)X)",
)];

pub fn is_documented(check: &str, terms: &[String]) -> bool {
    !terms.is_empty()
        && terms.iter().all(|t| {
            KNOWN_DISCREPANCIES
                .iter()
                .any(|(c, term, _)| *c == check && term == t)
        })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Compares route totals `a` and `b`. The tolerance is relative to the
/// larger of 1 and the magnitudes involved.
pub fn compare_routes(
    name: &str,
    route_a: &str,
    route_b: &str,
    total_a: &[f64],
    total_b: &[f64],
    terms: Vec<RouteTerm<'_>>,
    tol: f64,
) -> ConsistencyCheck {
    assert_eq!(total_a.len(), total_b.len());
    let scale = max_abs(total_a).max(max_abs(total_b)).max(1.0);
    let limit = tol * scale;
    let total = max_diff(total_a, total_b);
    let diffs: Vec<TermDiff> = terms
        .iter()
        .map(|t| TermDiff {
            term: t.name.to_string(),
            route_a: max_abs(&t.a),
            route_b: max_abs(&t.b),
            diff: max_diff(&t.a, &t.b),
        })
        .collect();

    let outcome = if total <= limit {
        Outcome::Agree
    } else {
        // residual of the totals not carried by the term decomposition
        let mut residual = 0.0f64;
        for k in 0..total_a.len() {
            let carried: f64 = terms.iter().map(|t| t.a[k] - t.b[k]).sum();
            residual = residual.max(((total_a[k] - total_b[k]) - carried).abs());
        }
        let offending: Vec<String> = diffs
            .iter()
            .filter(|d| d.diff > limit)
            .map(|d| d.term.clone())
            .collect();
        if residual <= limit && !offending.is_empty() {
            Outcome::Isolated { terms: offending }
        } else {
            Outcome::Unexplained
        }
    };
    let documented = match &outcome {
        Outcome::Isolated { terms } => is_documented(name, terms),
        _ => false,
    };
    ConsistencyCheck {
        name: name.to_string(),
        route_a: route_a.to_string(),
        route_b: route_b.to_string(),
        tol,
        max_diff: total,
        outcome,
        terms: diffs,
        documented,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term<'a>(name: &'a str, a: &[f64], b: &[f64]) -> RouteTerm<'a> {
        RouteTerm {
            name,
            a: a.to_vec(),
            b: b.to_vec(),
        }
    }

    #[test]
    fn agreement() {
        let c = compare_routes("x", "a", "b", &[1.0, 2.0], &[1.0, 2.0 + 1e-12], vec![], 1e-8);
        assert!(c.agrees());
        assert!(!c.is_failure(true));
    }

    #[test]
    fn isolated_term() {
        let c = compare_routes(
            "family_scalar",
            "a",
            "b",
            &[3.0],
            &[1.0],
            vec![term("ricci_scalar", &[1.0], &[1.0]), term("torsion_quadratic", &[2.0], &[0.0])],
            1e-8,
        );
        assert_eq!(
            c.outcome,
            Outcome::Isolated {
                terms: vec!["torsion_quadratic".into()]
            }
        );
        assert!(c.documented);
        assert!(!c.is_failure(false));
        assert!(c.is_failure(true));
    }

    #[test]
    fn undocumented_and_unexplained() {
        let c = compare_routes("other", "a", "b", &[3.0], &[1.0], vec![term("q", &[2.0], &[0.0])], 1e-8);
        assert!(!c.documented);
        assert!(c.is_failure(false));
        let c = compare_routes("other", "a", "b", &[3.0], &[1.0], vec![term("q", &[1.0], &[1.0])], 1e-8);
        assert_eq!(c.outcome, Outcome::Unexplained);
    }
}
