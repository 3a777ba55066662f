//! Text form of symbols: `poly: 1*x1^4 + 1*x2^4` and `metric: m=2; q=[[1,0],[0,1]]`.

use weyllab_core::symbols::SymbolForm;
use weyllab_core::{HomogeneousSymbol, Monomial};

use crate::error::{Blame, CliError, CliResult};

const PARAM: &str = "symbol";

fn invalid(message: impl Into<String>) -> CliError {
    CliError::invalid(PARAM, message)
}

/// Parses a symbol literal and validates the symbol.
pub fn parse_symbol(text: &str) -> CliResult<HomogeneousSymbol> {
    let text = text.trim();
    if let Some(body) = text.strip_prefix("poly:") {
        parse_polynomial(body)
    } else if let Some(body) = text.strip_prefix("metric:") {
        parse_metric(body)
    } else {
        Err(invalid("expected `poly:` or `metric:` prefix"))
    }
}

fn parse_number(s: &str, what: &str) -> CliResult<f64> {
    let v: f64 = s.trim().parse().map_err(|_| invalid(format!("cannot parse {what} `{}`", s.trim())))?;
    if !v.is_finite() {
        return Err(invalid(format!("{what} must be finite")));
    }
    Ok(v)
}

/// Splits at top-level `+` / `-` signs, skipping exponent signs in numbers
/// such as `1e-3`.
fn split_terms(body: &str) -> CliResult<Vec<(f64, String)>> {
    let compact: String = body.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(invalid("empty polynomial"));
    }
    let bytes = compact.as_bytes();
    let mut terms = Vec::new();
    let mut start = 0;
    let mut sign = 1.0;
    if bytes[0] == b'+' || bytes[0] == b'-' {
        sign = if bytes[0] == b'-' { -1.0 } else { 1.0 };
        start = 1;
    }
    let mut i = start;
    while i <= bytes.len() {
        let at_end = i == bytes.len();
        let is_sign =
            !at_end && (bytes[i] == b'+' || bytes[i] == b'-') && i > start && !matches!(bytes[i - 1], b'e' | b'E');
        if at_end || is_sign {
            let term = &compact[start..i];
            if term.is_empty() {
                return Err(invalid(format!("empty term {}", terms.len() + 1)));
            }
            terms.push((sign, term.to_owned()));
            if !at_end {
                sign = if bytes[i] == b'-' { -1.0 } else { 1.0 };
            }
            start = i + 1;
        }
        i += 1;
    }
    Ok(terms)
}

fn parse_term(sign: f64, term: &str, index: usize) -> CliResult<(f64, Vec<(usize, u32)>)> {
    let mut coeff = sign;
    let mut powers = Vec::new();
    for factor in term.split('*') {
        if let Some(var) = factor.strip_prefix('x') {
            let (idx, exp) = match var.split_once('^') {
                Some((i, e)) => (i, e),
                None => (var, "1"),
            };
            let idx: usize = idx
                .parse()
                .ok()
                .filter(|i| *i >= 1)
                .ok_or_else(|| invalid(format!("bad variable `x{idx}` in term {index}")))?;
            let exp: u32 = exp.parse().map_err(|_| invalid(format!("bad exponent `{exp}` in term {index}")))?;
            powers.push((idx - 1, exp));
        } else {
            coeff *= parse_number(factor, &format!("coefficient in term {index}"))?;
        }
    }
    Ok((coeff, powers))
}

fn parse_polynomial(body: &str) -> CliResult<HomogeneousSymbol> {
    let mut parsed = Vec::new();
    for (i, (sign, term)) in split_terms(body)?.into_iter().enumerate() {
        parsed.push(parse_term(sign, &term, i + 1)?);
    }
    let dim = parsed.iter().flat_map(|(_, p)| p.iter().map(|(i, _)| i + 1)).max().unwrap_or(0);
    if dim == 0 {
        return Err(invalid("polynomial has no variables"));
    }
    let mut monomials = Vec::with_capacity(parsed.len());
    let mut degree = None;
    for (i, (coeff, powers)) in parsed.into_iter().enumerate() {
        let mut exponents = vec![0u32; dim];
        for (var, exp) in powers {
            exponents[var] += exp;
        }
        let d: u32 = exponents.iter().sum();
        match degree {
            None => degree = Some(d),
            Some(first) if first != d => return Err(invalid(format!("mixed-degree monomial at term {}", i + 1))),
            _ => {}
        }
        monomials.push(Monomial::new(coeff, exponents));
    }
    HomogeneousSymbol::polynomial(dim, monomials).blame(PARAM)
}

fn parse_metric(body: &str) -> CliResult<HomogeneousSymbol> {
    let compact: String = body.chars().filter(|c| !c.is_whitespace()).collect();
    let mut degree = None;
    let mut matrix = None;
    for part in compact.split(';').filter(|p| !p.is_empty()) {
        match part.split_once('=') {
            Some(("m", v)) => degree = Some(parse_number(v, "m")?),
            Some(("q", v)) => matrix = Some(parse_matrix(v)?),
            _ => return Err(invalid(format!("unexpected `{part}` in metric literal"))),
        }
    }
    let degree = degree.ok_or_else(|| invalid("metric literal needs `m=`"))?;
    let (dim, entries) = matrix.ok_or_else(|| invalid("metric literal needs `q=`"))?;
    HomogeneousSymbol::metric_power(dim, entries, degree).blame(PARAM)
}

fn parse_matrix(text: &str) -> CliResult<(usize, Vec<f64>)> {
    let inner = text
        .strip_prefix("[[")
        .and_then(|t| t.strip_suffix("]]"))
        .ok_or_else(|| invalid("q must look like [[a,b],[c,d]]"))?;
    let rows: Vec<Vec<f64>> = inner
        .split("],[")
        .map(|row| row.split(',').map(|v| parse_number(v, "matrix entry")).collect())
        .collect::<CliResult<_>>()?;
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(invalid("q must be square"));
    }
    Ok((dim, rows.concat()))
}

/// Canonical literal; parsing it returns an identical symbol.
pub fn format_symbol(sym: &HomogeneousSymbol) -> String {
    match sym.form() {
        SymbolForm::Polynomial(monos) => {
            let mut out = String::from("poly: ");
            for (i, m) in monos.iter().enumerate() {
                let coeff = if i == 0 {
                    format!("{}", m.coeff)
                } else if m.coeff < 0.0 {
                    out.push_str(" - ");
                    format!("{}", -m.coeff)
                } else {
                    out.push_str(" + ");
                    format!("{}", m.coeff)
                };
                out.push_str(&coeff);
                for (j, &e) in m.exponents.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => out.push_str(&format!("*x{}", j + 1)),
                        _ => out.push_str(&format!("*x{}^{e}", j + 1)),
                    }
                }
            }
            out
        }
        SymbolForm::MetricPower { matrix } => {
            let n = sym.dim();
            let rows: Vec<String> = matrix
                .chunks(n)
                .map(|r| format!("[{}]", r.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",")))
                .collect();
            format!("metric: m={}; q=[{}]", sym.degree(), rows.join(","))
        }
    }
}
