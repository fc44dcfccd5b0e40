//! Line-oriented problem files.
//!
//! ```text
//! # comment
//! T = 5
//! m = 50
//! term: order=1.5 coeff="1"
//! term: order=0.3 coeff="1+t^2"
//! rhs = "exp(-t)"
//! ic = -5, 2
//! composition_mode = single
//! ```
//!
//! Lines may appear in any order. Quoted values use double quotes and have
//! no escapes.

use std::sync::Arc;

use bpfrac::{parse, Coefficient, CompositionMode, Expr, FdeProblem64, FdeTerm, Grid64, Signal};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct TermSpec {
    pub order: f64,
    pub coeff: Expr,
}

/// Parsed, validated contents of a problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub length: f64,
    pub m: usize,
    pub terms: Vec<TermSpec>,
    pub rhs: Expr,
    pub ics: Vec<f64>,
    pub mode: CompositionMode,
}

fn input_err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("line {line}: {msg}"))
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut length = None;
        let mut m = None;
        let mut rhs = None;
        let mut ics = None;
        let mut mode = None;
        let mut terms = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("term:") {
                terms.push(parse_term(rest, lineno)?);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| input_err(lineno, "expected `key = value`"))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "T" => set_once(&mut length, parse_real(value, lineno)?, key, lineno)?,
                "m" => {
                    let v: usize = value.parse().map_err(|_| {
                        input_err(
                            lineno,
                            format!("`m` must be a positive integer, got `{value}`"),
                        )
                    })?;
                    set_once(&mut m, v, key, lineno)?
                }
                "rhs" => set_once(&mut rhs, parse_quoted_expr(value, lineno)?, key, lineno)?,
                "ic" => {
                    let v = value
                        .split(',')
                        .map(|s| parse_real(s.trim(), lineno))
                        .collect::<Result<Vec<_>, _>>()?;
                    set_once(&mut ics, v, key, lineno)?
                }
                "composition_mode" => {
                    let v = match value {
                        "single" => CompositionMode::Single,
                        "composed" => CompositionMode::Composed,
                        other => {
                            return Err(input_err(
                                lineno,
                                format!(
                                "composition_mode must be `single` or `composed`, got `{other}`"
                            ),
                            ))
                        }
                    };
                    set_once(&mut mode, v, key, lineno)?
                }
                other => return Err(input_err(lineno, format!("unknown key `{other}`"))),
            }
        }

        let missing = |key: &str| CliError::Input(format!("missing required key `{key}`"));
        let length = length.ok_or_else(|| missing("T"))?;
        let m = m.ok_or_else(|| missing("m"))?;
        let rhs = rhs.ok_or_else(|| missing("rhs"))?;
        let ics = ics.ok_or_else(|| missing("ic"))?;
        if terms.is_empty() {
            return Err(missing("term"));
        }

        let file = Self {
            length,
            m,
            terms,
            rhs,
            ics,
            mode: mode.unwrap_or_default(),
        };
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.m == 0 {
            return Err(CliError::Input("`m` must be at least 1".into()));
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(CliError::Input(
                "`T` must be a positive finite number".into(),
            ));
        }
        let lead = self
            .terms
            .iter()
            .max_by(|a, b| a.order.total_cmp(&b.order))
            .expect("at least one term");
        if !(lead.order > 0.0) {
            return Err(CliError::Input(
                "the highest term order must be positive".into(),
            ));
        }
        let unit = lead.coeff.is_constant() && lead.coeff.eval(0.0f64).ok() == Some(1.0);
        if !unit {
            return Err(CliError::Input(format!(
                "the order-{} term must have coeff \"1\", got \"{}\"",
                lead.order, lead.coeff
            )));
        }
        let n = lead.order.ceil() as usize;
        if self.ics.len() != n {
            return Err(CliError::Input(format!(
                "`ic` needs {n} values for highest order {}, got {}",
                lead.order,
                self.ics.len()
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid64, CliError> {
        Grid64::new(self.m, self.length).map_err(|e| CliError::Input(e.to_string()))
    }

    /// Builds the solver problem; expressions without `t` become constants.
    pub fn to_problem(&self) -> Result<FdeProblem64, CliError> {
        let terms = self
            .terms
            .iter()
            .map(|term| {
                let coeff = if term.coeff.is_constant() {
                    Coefficient::Constant(term.coeff.eval(0.0).map_err(CliError::from_core)?)
                } else {
                    Coefficient::Function(expr_signal(term.coeff.clone()))
                };
                FdeTerm::new(term.order, coeff).map_err(|e| CliError::Input(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        FdeProblem64::new(
            terms,
            expr_signal(self.rhs.clone()),
            self.ics.clone(),
            self.grid()?,
        )
        .map(|p| p.with_composition_mode(self.mode))
        .map_err(|e| CliError::Input(e.to_string()))
    }
}

fn expr_signal(e: Expr) -> Signal<f64> {
    Arc::new(move |t| e.eval(t))
}

fn set_once<T>(slot: &mut Option<T>, value: T, key: &str, line: usize) -> Result<(), CliError> {
    if slot.is_some() {
        return Err(input_err(line, format!("duplicate key `{key}`")));
    }
    *slot = Some(value);
    Ok(())
}

fn parse_real(s: &str, line: usize) -> Result<f64, CliError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(input_err(
            line,
            format!("expected a finite real number, got `{s}`"),
        )),
    }
}

fn parse_quoted_expr(value: &str, line: usize) -> Result<Expr, CliError> {
    let inner = value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .filter(|v| !v.contains('"'))
        .ok_or_else(|| {
            input_err(
                line,
                format!("expected a double-quoted expression, got `{value}`"),
            )
        })?;
    parse(inner).map_err(|e| input_err(line, format!("in \"{inner}\": {e}")))
}

/// `order=<real> coeff="<expr>"`, in either order, spaces allowed around `=`.
fn parse_term(rest: &str, line: usize) -> Result<TermSpec, CliError> {
    let mut order = None;
    let mut coeff = None;
    let mut s = rest.trim_start();
    while !s.is_empty() {
        let (name, after) = s
            .split_once('=')
            .ok_or_else(|| input_err(line, "expected `order=<real> coeff=\"<expr>\"`"))?;
        let name = name.trim();
        let after = after.trim_start();
        let (value, tail) = if let Some(quoted) = after.strip_prefix('"') {
            let close = quoted
                .find('"')
                .ok_or_else(|| input_err(line, "unterminated quoted expression"))?;
            (&after[..close + 2], &quoted[close + 1..])
        } else {
            let end = after.find(char::is_whitespace).unwrap_or(after.len());
            (&after[..end], &after[end..])
        };
        match name {
            "order" => set_once(&mut order, parse_real(value, line)?, name, line)?,
            "coeff" => set_once(&mut coeff, parse_quoted_expr(value, line)?, name, line)?,
            other => return Err(input_err(line, format!("unknown term field `{other}`"))),
        }
        s = tail.trim_start();
    }
    let order = order.ok_or_else(|| input_err(line, "term is missing `order`"))?;
    let coeff = coeff.ok_or_else(|| input_err(line, "term is missing `coeff`"))?;
    if order < 0.0 {
        return Err(input_err(
            line,
            format!("term order must be non-negative, got {order}"),
        ));
    }
    Ok(TermSpec { order, coeff })
}
