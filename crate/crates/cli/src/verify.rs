//! Verification suites: every check is an exact comparison reported on its
//! own line.

use std::path::Path;

use serde_json::json;
use twbeta_core::algebra::rational::fmt_rational;
use twbeta_core::algebra::{rat, Rational};
use twbeta_core::deviation::{assemble_deviation, integrate_correction};
use twbeta_core::painleve::{cross_validate, exact_prefactor, f_beta_series, painleve_series};
use twbeta_core::reference;
use twbeta_core::tail::{breve_extract, breve_to_r, double_scaling_check, PrefactorExponents, TailExpansion, TailKind};

use crate::{one_point, parse_beta, tail_expansion, table_with, CliError, Output, Suite};

struct Check {
    item: String,
    expected: String,
    actual: String,
}

impl Check {
    fn ok(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Default)]
struct Report {
    checks: Vec<Check>,
}

impl Report {
    fn push(&mut self, item: impl Into<String>, expected: impl ToString, actual: impl ToString) {
        self.checks.push(Check {
            item: item.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        });
    }

    fn finish(self, suite: &str) -> Output {
        let failed = self.checks.iter().filter(|c| !c.ok()).count();
        let mut text = String::new();
        for c in &self.checks {
            if c.ok() {
                text.push_str(&format!("ok    {}  {}\n", c.item, c.expected));
            } else {
                text.push_str(&format!("FAIL  {}  expected {}  found {}\n", c.item, c.expected, c.actual));
            }
        }
        text.push_str(&format!("{} checks, {} failed\n", self.checks.len(), failed));
        let json = json!({
            "kind": "verify",
            "suite": suite,
            "passed": failed == 0,
            "checks": self.checks.iter().map(|c| json!({
                "item": c.item, "expected": c.expected, "actual": c.actual, "ok": c.ok(),
            })).collect::<Vec<_>>(),
        });
        Output {
            json: vec![json],
            text,
            failed: (failed > 0).then(|| format!("{failed} of {} checks failed in suite {suite}", self.checks.len())),
        }
    }
}

fn betas(beta: Option<&str>) -> Result<Vec<u32>, CliError> {
    match beta {
        None | Some("all") => Ok(vec![1, 2, 4]),
        Some(s) => match parse_beta(s)? {
            Some(b) if b == rat(1, 1) => Ok(vec![1]),
            Some(b) if b == rat(2, 1) => Ok(vec![2]),
            Some(b) if b == rat(4, 1) => Ok(vec![4]),
            _ => Err(CliError::Usage("this suite supports beta 1, 2, 4 or all".into())),
        },
    }
}

fn order_in(order: Option<usize>, default: usize, max: usize) -> Result<usize, CliError> {
    let o = order.unwrap_or(default);
    if o == 0 || o > max {
        return Err(CliError::Usage(format!("order must be between 1 and {max}")));
    }
    Ok(o)
}

fn paper(cache: Option<&Path>, order: usize) -> Result<Output, CliError> {
    let mut r = Report::default();
    let wanted: Vec<(usize, usize)> = reference::CORRELATORS.iter().map(|c| (c.0, c.1)).collect();
    let t = table_with(cache, &wanted)?;
    for (n, k, src) in reference::CORRELATORS {
        let want = reference::correlator(n, k).expect("listed");
        let got = t.value(n, k)?;
        r.push(format!("omega_{n}^[{k}]"), src, if got == &want { src.to_string() } else { got.to_string() });
    }
    let t = one_point(cache, (order + 1).max(4))?;
    for k in 2..=4 {
        let want = reference::integral(k).expect("listed");
        let got = integrate_correction(k, &t)?;
        r.push(format!("integral of omega_1^[{k}]"), &want, &got);
    }
    let entries = (1..=order.max(3)).map(|m| breve_extract(m, &t)).collect::<Result<Vec<_>, _>>()?;
    for (m, p, poly) in reference::breve() {
        let e = &entries[m - 1];
        r.push(format!("breve m = {m}"), format!("p = {p}, {poly}"), format!("p = {}, {}", e.p, e.poly));
    }
    let rs = breve_to_r(&entries)?;
    for (m, want) in reference::r_polys().iter().enumerate() {
        r.push(format!("R_{}", m + 1), want, &rs[m]);
    }
    let te = twbeta_core::tail::assemble_tail(order, &entries)?;
    for beta in [1u32, 2, 4] {
        let x = rat(2, beta as i64);
        let want = reference::tail_coefficients(beta).expect("listed");
        for m in 1..=order {
            r.push(
                format!("tail beta = {beta} coefficient of s^(-{}/2)", 3 * m),
                fmt_rational(&want[m - 1]),
                fmt_rational(&te.complement_expanded[m].eval(&x)),
            );
        }
    }
    if order >= 2 {
        // c_2 = e_2 + e_1²/2 at β = 2
        let x = rat(1, 1);
        let e1 = te.complement_exponent[1].eval(&x);
        let e2 = te.complement_exponent[2].eval(&x);
        r.push("beta = 2 composite c_2 = e_2 + e_1^2/2", "3745/1152", fmt_rational(&(e2 + &e1 * &e1 / rat(2, 1))));
    }
    Ok(r.finish("paper"))
}

fn painleve(cache: Option<&Path>, order: usize, betas: &[u32]) -> Result<Output, CliError> {
    let mut r = Report::default();
    let ps = painleve_series(7);
    let with_one = |v: Vec<Rational>| -> Vec<Rational> { std::iter::once(rat(1, 1)).chain(v).collect() };
    let iq = ps.int_q.normalize();
    for (j, want) in with_one(reference::int_q_coefficients()).iter().enumerate() {
        r.push(format!("int q coefficient {j}"), fmt_rational(want), fmt_rational(&iq.coeffs[j]));
    }
    let ir = ps.int_r.normalize();
    for (j, want) in with_one(reference::int_r_coefficients()).iter().enumerate() {
        r.push(format!("int R coefficient {j}"), fmt_rational(want), fmt_rational(&ir.coeffs[j]));
    }
    let (_, te) = tail_expansion(cache, order)?;
    for &beta in betas {
        let x = rat(2, beta as i64);
        let oracle = f_beta_series(beta, order + 1).map_err(|e| CliError::Domain(e.to_string()))?;
        r.push(format!("beta = {beta} rate"), fmt_rational(&oracle.rate), fmt_rational(&-TailExpansion::rate().eval(&x)));
        r.push(
            format!("beta = {beta} power of s"),
            fmt_rational(&-&oracle.power),
            fmt_rational(&TailExpansion::log_power(TailKind::Complement).eval(&x)),
        );
        let (c, pi) = exact_prefactor(TailKind::Complement, beta).map_err(|e| CliError::Domain(e.to_string()))?;
        r.push(
            format!("beta = {beta} constant"),
            format!("{} pi^({}/2)", fmt_rational(&oracle.constant), oracle.pi_half),
            format!("{} pi^({}/2)", fmt_rational(&c), pi),
        );
        for m in 1..=order {
            r.push(
                format!("beta = {beta} coefficient {m}"),
                fmt_rational(&oracle.coeffs[m]),
                fmt_rational(&te.complement_expanded[m].eval(&x)),
            );
        }
        let status = match cross_validate(beta, &te, order) {
            Ok(_) => "consistent".to_string(),
            Err(e) => e.to_string(),
        };
        r.push(format!("beta = {beta} complement and density"), "consistent", status);
    }
    Ok(r.finish("painleve"))
}

fn scaling(cache: Option<&Path>, order: usize) -> Result<Output, CliError> {
    let mut r = Report::default();
    let t = one_point(cache, order + 1)?;
    let exp = assemble_deviation(order, &t)?;
    let (_, te) = tail_expansion(cache, order)?;
    let rep = match double_scaling_check(&exp, order) {
        Ok(rep) => rep,
        Err(e) => {
            r.push("no residual powers of N", "none", e.to_string());
            return Ok(r.finish("scaling"));
        }
    };
    r.push("rate (coefficient of s^(3/2))", TailExpansion::rate(), &rep.rate);
    r.push("complement power of s", TailExpansion::log_power(TailKind::Complement), &rep.complement_log_power);
    r.push("density power of s", TailExpansion::log_power(TailKind::Density), &rep.density_log_power);
    for (kind, got, name) in [
        (TailKind::Complement, &rep.complement_prefactor, "complement"),
        (TailKind::Density, &rep.density_prefactor, "density"),
    ] {
        let want = PrefactorExponents::for_kind(kind);
        r.push(format!("{name} exponent of Gamma(beta/2)"), &want.gamma, &got.gamma);
        r.push(format!("{name} exponent of 2"), &want.two, &got.two);
        r.push(format!("{name} exponent of beta"), &want.beta, &got.beta);
        r.push(format!("{name} exponent of pi"), &want.pi, &got.pi);
    }
    for m in 1..=order {
        r.push(format!("density exponent m = {m}"), &te.density_exponent[m], &rep.density_exponent[m]);
    }
    r.push("stray terms", 0, rep.stray.len());
    Ok(r.finish("scaling"))
}

pub fn run(cache: Option<&Path>, suite: Suite, order: Option<usize>, beta: Option<&str>) -> Result<Output, CliError> {
    match suite {
        Suite::Paper => paper(cache, order_in(order, 6, 6)?),
        Suite::Painleve => painleve(cache, order_in(order, 6, 12)?, &betas(beta)?),
        Suite::Scaling => scaling(cache, order_in(order, 3, 12)?),
    }
}
