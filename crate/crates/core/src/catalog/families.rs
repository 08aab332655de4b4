use crate::gbranch::DeltaCase;
use crate::reduction::Equation;

/// One printed row: `u` as a formula in `xi`, `f`, `g` and the parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaperRow {
    pub case: DeltaCase,
    pub u: &'static str,
}

/// A printed solution family, transcribed as published (typos included).
///
/// Formulas use `f`, `g` for the hyperbolic and trigonometric quotients of
/// the G branches, `xi` for the wave coordinate, `a` for the KP y-coefficient
/// and `sigma2` for its sign parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaperFamily {
    pub id: &'static str,
    pub equation: Equation,
    /// 0 for `c1 = 0`, 1 for the nonzero root.
    pub c1_case: usize,
    /// Coefficients of `x`, `t`, `y` in the printed wave coordinate.
    pub xi: [&'static str; 3],
    /// Rows in positive, negative, zero discriminant order.
    pub rows: [PaperRow; 3],
    /// Formula bound to `omega` where the rows mention it.
    pub omega: Option<&'static str>,
    /// Expressions that must not vanish.
    pub nonzero: &'static [&'static str],
    /// A wave coordinate consistent with the family's own dispersion relation,
    /// tested alongside the printed one.
    pub corrected_xi: Option<[&'static str; 3]>,
    pub anchor: &'static str,
    pub notes: &'static str,
}

impl PaperFamily {
    pub fn row(&self, case: DeltaCase) -> &PaperRow {
        self.rows
            .iter()
            .find(|r| r.case == case)
            .expect("three rows")
    }
}

const fn rows(pos: &'static str, neg: &'static str, zero: &'static str) -> [PaperRow; 3] {
    [
        PaperRow {
            case: DeltaCase::Positive,
            u: pos,
        },
        PaperRow {
            case: DeltaCase::Negative,
            u: neg,
        },
        PaperRow {
            case: DeltaCase::Zero,
            u: zero,
        },
    ]
}

const RATIONAL_NOTE: &str = "rational row printed with c1/(c1*xi+C2); read as k1/(k1*xi+k2)";

const U33_T: &str = "-(4*k^4*mu-2*k^2*C-k^4*lambda^2+6*k^2*sigma2*a^2-3*sigma2*a^2)/(k*(-1+2*k^3))";
const U34_T: &str =
    "-(-4*k^4*mu+2*k^2*C+k^4*lambda^2+6*k^2*sigma2*a^2-3*sigma2*a^2)/(k*(-1+2*k^3))";

static CATALOG: [PaperFamily; 12] = [
    PaperFamily {
        id: "U11",
        equation: Equation::Burgers,
        c1_case: 0,
        xi: ["1", "-(2*C-2*beta)", "0"],
        rows: rows(
            "2*beta/alpha + 2*beta/alpha*(-lambda/2 + sqrt(lambda^2-4*mu)/2*f)",
            "2*beta/alpha + 2*beta/alpha*(-lambda/2 + sqrt(4*mu-lambda^2)/2*g)",
            "2*beta/alpha + 2*beta/alpha*(-lambda/2 + k1/(k1*xi+k2))",
        ),
        omega: None,
        nonzero: &["alpha"],
        corrected_xi: None,
        anchor: "Burgers, c1 = 0, xi = x-(2C-2beta)t",
        notes: "",
    },
    PaperFamily {
        id: "U12",
        equation: Equation::Burgers,
        c1_case: 0,
        xi: ["1", "-(2*C-beta*mu)", "0"],
        rows: rows(
            "2*beta*mu/alpha + 2*beta/alpha*(-lambda/2 + sqrt(lambda^2-4*mu)/2*f)",
            "2*beta*mu/alpha + 2*beta/alpha*(-lambda/2 + sqrt(4*mu-lambda^2)/2*g)",
            "2*beta*mu/alpha + 2*beta/alpha*(-lambda/2 + k1/(k1*xi+k2))",
        ),
        omega: None,
        nonzero: &["alpha"],
        corrected_xi: None,
        anchor: "Burgers, c1 = 0, xi = x-(2C-beta*mu)t",
        notes: "",
    },
    PaperFamily {
        id: "U13",
        equation: Equation::Burgers,
        c1_case: 1,
        xi: ["1", "-(2*C-2*beta+beta*mu)", "0"],
        rows: rows(
            "(-2*beta-beta*lambda+2*C+2*beta*mu)/alpha + beta*sqrt(lambda^2-4*mu)/alpha*f",
            "(-2*beta-beta*lambda+2*C+2*beta*mu)/alpha + beta*sqrt(4*mu-lambda^2)/alpha*g",
            "(-2*beta+2*C-beta*lambda+2*beta*mu)/alpha + 2*beta/alpha*(k1/(k1*xi+k2))",
        ),
        omega: None,
        nonzero: &["alpha"],
        corrected_xi: None,
        anchor: "Burgers, c1 = 2(omega-C)/alpha, xi = x-(2C-2beta+beta*mu)t",
        notes: "",
    },
    PaperFamily {
        id: "U14",
        equation: Equation::Burgers,
        c1_case: 1,
        xi: ["1", "-(2*C-beta*mu)", "0"],
        rows: rows(
            "(-beta*lambda+2*C)/alpha + beta*sqrt(lambda^2-4*mu)/alpha*f",
            "(-beta*lambda+2*C)/alpha + beta*sqrt(4*mu-lambda^2)/alpha*g",
            "(-beta*lambda+2*C)/alpha + 2*beta/alpha*(k1/(k1*xi+k2))",
        ),
        omega: None,
        nonzero: &["alpha"],
        corrected_xi: None,
        anchor: "Burgers, c1 = 2(omega-C)/alpha, xi = x-(2C-beta*mu)t",
        notes: "",
    },
    PaperFamily {
        id: "U21",
        equation: Equation::Kdv,
        c1_case: 0,
        xi: ["1", "-gamma*(4*mu-lambda^2)", "0"],
        rows: rows(
            "(-4*gamma*mu+gamma*lambda^2)/alpha - 3*gamma*(lambda^2-4*mu)/alpha*f^2",
            "(-4*gamma*mu+gamma*lambda^2)/alpha - 3*gamma*(lambda^2-4*mu)/alpha*g^2",
            "(-4*gamma*mu+6*gamma*mu*lambda-5*gamma*lambda^2)/alpha \
             + 12*gamma*(lambda-mu)/alpha*(k1/(k1*xi+k2)) - 12*gamma/alpha*(k1/(k1*xi+k2))^2",
        ),
        omega: None,
        nonzero: &["alpha"],
        corrected_xi: None,
        anchor: "KdV, c1 = 0, xi = x-gamma(4mu-lambda^2)t",
        notes: "",
    },
    PaperFamily {
        id: "U22",
        equation: Equation::Kdv,
        c1_case: 0,
        xi: ["1", "gamma*(4*mu-lambda^2)", "0"],
        rows: rows(
            "6*gamma*(lambda-mu)*sqrt(lambda^2-4*mu)/alpha*f - 3*gamma*(lambda^2-4*mu)/alpha*f^2 \
             + (-12*gamma*mu+6*gamma*mu*lambda-3*gamma*lambda^2)/alpha",
            "6*gamma*(lambda-mu)*sqrt(lambda^2-4*mu)/alpha*g - 3*gamma*(lambda^2-4*mu)/alpha*g^2 \
             + (-12*gamma*mu+6*gamma*mu*lambda-3*gamma*lambda^2)/alpha",
            "(-12*gamma*mu+6*gamma*mu*lambda-3*gamma*lambda^2)/alpha \
             + 12*gamma*(lambda-mu)/alpha*(k1/(k1*xi+k2)) - 12*gamma/alpha*(k1/(k1*xi+k2))^2",
        ),
        omega: None,
        nonzero: &["alpha"],
        corrected_xi: None,
        anchor: "KdV, c1 = 0, xi = x+gamma(4mu-lambda^2)t",
        notes: "negative-discriminant row keeps sqrt(lambda^2-4mu), which is not real there",
    },
    PaperFamily {
        id: "U23",
        equation: Equation::Kdv,
        c1_case: 1,
        xi: ["1", "-(2*C+4*gamma*mu-lambda^2*gamma)", "0"],
        rows: rows(
            "(-4*gamma*mu+gamma*lambda^2+2*C)/alpha - 3*gamma*(lambda^2-4*mu)/alpha*f^2",
            "(-4*gamma*mu+gamma*lambda^2+2*C)/alpha - 3*gamma*(lambda^2-4*mu)/alpha*g^2",
            "(-4*gamma*mu+gamma*lambda^2+2*C)/alpha - 12*gamma/alpha*(k1/(k1*xi+k2))^2",
        ),
        omega: None,
        nonzero: &["alpha"],
        corrected_xi: None,
        anchor: "KdV, c1 = (2omega-2C)/alpha, xi = x-(2C+4gamma*mu-lambda^2*gamma)t",
        notes: "",
    },
    PaperFamily {
        id: "U24",
        equation: Equation::Kdv,
        c1_case: 1,
        xi: ["1", "-(2*C+4*gamma*mu+lambda^2*gamma)", "0"],
        rows: rows(
            "(-12*gamma*mu+3*gamma*lambda^2+2*C)/alpha - 3*gamma*(lambda^2-4*mu)/alpha*f^2",
            "(-12*gamma*mu+3*gamma*lambda^2+2*C)/alpha - 3*gamma*(lambda^2-4*mu)/alpha*g^2",
            "(-12*gamma*mu+3*gamma*lambda^2+2*C)/alpha - 12*gamma/alpha*(k1/(k1*xi+k2))^2",
        ),
        omega: None,
        nonzero: &["alpha"],
        corrected_xi: None,
        anchor: "KdV, c1 = (2omega-2C)/alpha, xi = x-(2C+4gamma*mu+lambda^2*gamma)t",
        notes: "",
    },
    PaperFamily {
        id: "U31",
        equation: Equation::Kp,
        c1_case: 0,
        xi: ["1", "-(4*k^4*mu-3*sigma2*a^2-k^4*lambda^2)/k", "0"],
        rows: rows(
            "-2*k^2*mu + 1/2*k^2*lambda^2 - k^2*(lambda^2-4*mu)/2*f^2",
            "-2*k^2*mu + 1/2*k^2*lambda^2 - k^2*(4*mu-lambda^2)/2*g^2",
            "-2*k^2*mu + 1/2*k^2*lambda^2 - 2*k^2*(k1/(k1*xi+k2))^2",
        ),
        omega: None,
        nonzero: &["k"],
        corrected_xi: Some(["k", "(4*k^4*mu-3*sigma2*a^2-k^4*lambda^2)/k", "a"]),
        anchor: "KP, c1 = 0, first branch",
        notes: RATIONAL_NOTE,
    },
    PaperFamily {
        id: "U32",
        equation: Equation::Kp,
        c1_case: 0,
        xi: ["1", "-(4*k^4*mu-3*sigma2*a^2-k^4*lambda^2)/k", "0"],
        rows: rows(
            "-2/3*k^2*mu + 1/6*k^2*lambda^2 - k^2*(lambda^2-4*mu)/2*f^2",
            "-2/3*k^2*mu + 1/6*k^2*lambda^2 - k^2*(4*mu-lambda^2)/2*g^2",
            "-2/3*k^2*mu + 1/6*k^2*lambda^2 - 2*k^2*(k1/(k1*xi+k2))^2",
        ),
        omega: None,
        nonzero: &["k"],
        corrected_xi: Some(["k", "-(4*k^4*mu+3*sigma2*a^2-k^4*lambda^2)/k", "a"]),
        anchor: "KP, c1 = 0, second branch",
        notes: RATIONAL_NOTE,
    },
    PaperFamily {
        id: "U33",
        equation: Equation::Kp,
        c1_case: 1,
        xi: ["k", U33_T, "a"],
        rows: rows(
            "(-12*k^2*mu+3*k^2*lambda^2-2*C-6*sigma2*a^2-2*k^2*omega)/6 - k^2*(lambda^2-4*mu)/2*f^2",
            "-(-12*k^2*mu+3*k^2*lambda^2-2*C-6*sigma2*a^2-2*k^2*omega)/6 - k^2*(4*mu-lambda^2)/2*g^2",
            "(-12*k^2*mu+3*k^2*lambda^2-2*C-6*sigma2*a^2-2*k^2*omega)/6 - 2*k^2*(k1/(k1*xi+k2))^2",
        ),
        omega: Some(U33_T),
        nonzero: &["k", "-1+2*k^3"],
        corrected_xi: None,
        anchor: "KP, c1 = (-C-3sigma^2a^2-k^2omega)/3, first branch",
        notes: "omega is the printed t-coefficient; t/k(-1+2k^3) read as t/(k(-1+2k^3))",
    },
    PaperFamily {
        id: "U34",
        equation: Equation::Kp,
        c1_case: 1,
        xi: ["k", U34_T, "a"],
        rows: rows(
            "(-4*k^2*mu+k^2*lambda^2-2*C-6*sigma2*a^2-2*k^2*omega)/6 - k^2*(lambda^2-4*mu)/2*f^2",
            "(-4*k^2*mu+k^2*lambda^2-2*C-6*sigma2*a^2-2*k^2*omega)/6 - k^2*(4*mu-lambda^2)/2*g^2",
            "(-4*k^2*mu+k^2*lambda^2-2*C-6*sigma2*a^2-2*k^2*omega)/6 - 2*k^2*(k1/(k1*xi+k2))^2",
        ),
        omega: Some(U34_T),
        nonzero: &["k", "-1+2*k^3"],
        corrected_xi: None,
        anchor: "KP, c1 = (-C-3sigma^2a^2-k^2omega)/3, second branch",
        notes: "omega is the printed t-coefficient; t/k(-1+2k^3) read as t/(k(-1+2k^3))",
    },
];

/// The twelve printed families in id order.
pub fn paper_catalog() -> &'static [PaperFamily] {
    &CATALOG
}

pub fn family(id: &str) -> Option<&'static PaperFamily> {
    CATALOG.iter().find(|f| f.id.eq_ignore_ascii_case(id))
}

/// Printed coefficient systems, one row per power of `w` from 0 upward,
/// for each c1 case. Coefficients are written `a0, a1, a2`; in the KP rows
/// `a` is the y-coefficient and `C2` an unexplained symbol kept as printed.
pub fn paper_system(equation: Equation, c1_case: usize) -> &'static [&'static str] {
    match (equation, c1_case) {
        (Equation::Burgers, 0) => &[
            "-omega*a0 + 1/2*alpha*a0^2 + beta*a0 - beta*a1*mu",
            "-omega*a1 + alpha*a0*a1 - beta*a1*mu",
            "1/2*alpha*a1^2 - beta*a1",
        ],
        (Equation::Burgers, _) => &[
            "omega*a0 - 2*C*a0 + 1/2*alpha*a0^2 + beta*a0 - beta*a1*mu",
            "omega*a1 - 2*C*a1 + alpha*a0*a1 - beta*a1*mu",
            "1/2*alpha*a1^2 - beta*a1",
        ],
        (Equation::Kdv, 0) => &[
            "-omega*a0 + 1/2*alpha*a0^2 + 2*gamma*a2*mu^2 + gamma*a1*lambda*mu",
            "-omega*a1 + alpha*a0*a1 + 6*gamma*a2*lambda*mu + 2*gamma*a1*mu + a1*mu + a1*lambda^2*gamma",
            "-omega*a2 + alpha*a0*a2 + 1/2*alpha*a1^2 + 4*gamma*a2*lambda^2 + 3*a1*gamma*lambda + 8*a2*mu*gamma",
            "alpha*a1*a2 + 10*gamma*a2*lambda + 2*a1*gamma",
            "1/2*alpha*a2 + 6*a2*gamma",
        ],
        (Equation::Kdv, _) => &[
            "omega*a0 - 2*C*a0 + 1/2*alpha*a0^2 + 2*gamma*a2*mu^2 + gamma*a1*lambda*mu^2",
            "omega*a1 - 2*C*a1 + alpha*a0*a1 + 6*gamma*a2*lambda*mu + 2*gamma*a1*mu + a1*mu + a1*lambda^2*gamma",
            "omega*a2 - 2*C*a2 + alpha*a0*a2 + 1/2*alpha*a1^2 + 4*gamma*a2*lambda^2 + 3*a1*gamma*lambda + 8*a2*mu*gamma",
            "alpha*a1*a2 + 10*gamma*a2*lambda + 2*a1*gamma",
            "1/2*alpha*a2^2 + 6*a2*gamma",
        ],
        (Equation::Kp, 0) => &[
            "k*omega*a0 + k^4*a1*lambda*mu + 3*k^2*a0^2 + 3*sigma2*a^2*a0 + 2*k^4*a2*mu^2",
            "k*omega*a1 + 2*k^4*a1*mu + a*k^2*a0*a1 + 3*sigma2*a^2*a1 + 6*k^4*a2*lambda*mu + k^4*a1*lambda^2",
            "3*sigma2*a^2*a2 + k*omega*a2 + 3*k^2*a1^2 + 3*k^4*a1*lambda + 8*k^4*a2*mu + 6*k^2*a0*a1*a2 \
             + 4*k^4*a2*lambda^2",
            "6*k^4*a*a2 + 10*k^4*a2*lambda + 2*k^4*a1",
            "3*k^2*a2^2 + 6*k^4*a2",
        ],
        (Equation::Kp, _) => &[
            "k*omega*a0 - 2*k^2*C*a0 - 6*k^2*sigma2*a^2*a0 + 3*k^2*a0^2 + 3*sigma2*a^2*a0 + 2*k^4*a2*mu^2 \
             - 2*k^4*omega*a0 + k^4*a1*lambda*mu",
            "2*k^4*a1*mu - 2*k^4*omega*a1 + 2*k^4*a1*lambda^2 + k*omega*a1 - 2*k^2*C*a1 + 6*k^4*a2 \
             - 6*k^2*sigma2*a^2*a1 + 6*k^2*a0*a1 + 3*sigma2*a^2*a1",
            "-6*k^2*sigma2*a^2*a2 - 2*k^2*omega*a2 + 6*k^2*a0*a2 - 2*k^2*C*a2 + 3*k^4*a1*lambda + 3*k^2*a1^2 \
             + k*omega*a2 + 8*k^4*a2*mu + 3*sigma2*a^2*a2 + 4*k^4*a2*lambda^2",
            "6*k^2*a1*a2 + 10*k^4*a2*lambda + 2*k^4*a1",
            "3*k^2*C2^2 + 6*k^4*a2",
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    #[test]
    fn twelve_families_three_rows() {
        let cat = paper_catalog();
        assert_eq!(cat.len(), 12);
        for f in cat {
            let cases: Vec<_> = f.rows.iter().map(|r| r.case).collect();
            assert_eq!(cases, DeltaCase::ALL);
        }
        let ids: Vec<_> = cat.iter().map(|f| f.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn every_formula_parses() {
        for f in paper_catalog() {
            for r in &f.rows {
                Expr::parse(r.u).unwrap();
            }
            for x in
                f.xi.iter()
                    .chain(f.corrected_xi.iter().flatten())
                    .chain(f.omega.iter())
            {
                Expr::parse(x).unwrap();
            }
            for n in f.nonzero {
                Expr::parse(n).unwrap();
            }
        }
        for eq in Equation::ALL {
            for case in 0..2 {
                let rows = paper_system(eq, case);
                assert_eq!(rows.len(), if eq == Equation::Burgers { 3 } else { 5 });
                for r in rows {
                    Expr::parse(r).unwrap();
                }
            }
        }
    }

    #[test]
    fn lookup_is_case_insensitive() {
        assert_eq!(family("u24").unwrap().id, "U24");
        assert!(family("U99").is_none());
    }
}
