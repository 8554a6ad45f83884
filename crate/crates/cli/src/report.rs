//! Verification reports: a stable JSON schema plus a plain-text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use algebroid_core::symkernel::{to_text, Context, DiffPolynomial};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "algebroid-report/1";

/// Witness terms kept per nonzero residual.
const MAX_WITNESSES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    /// Exactly zero.
    Zero,
    /// A total divergence (all variational derivatives vanish).
    Trivial,
    Nonzero,
    /// Informational output; never fails the run.
    Info,
}

impl CheckStatus {
    pub fn passed(self) -> bool {
        !matches!(self, CheckStatus::Nonzero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Component, section or variational derivative the terms come from.
    pub at: String,
    pub terms: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Input {
    pub source: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    /// Terms across every expression shown in the checks.
    pub terms: usize,
    pub max_jet_order: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Verified,
    Residual,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub inputs: Vec<Input>,
    pub outcome: Outcome,
    pub checks: Vec<Check>,
    pub stats: Stats,
    /// Wall time; the only field that varies between identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            schema: SCHEMA.into(),
            command: command.into(),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            outcome: Outcome::Verified,
            checks: Vec::new(),
            stats: Stats::default(),
            elapsed_ms: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }

    pub fn push(&mut self, check: Check) {
        if !check.status.passed() {
            self.outcome = Outcome::Residual;
        }
        self.checks.push(check);
    }

    fn track(&mut self, p: &DiffPolynomial) {
        self.stats.terms += p.len();
        self.stats.max_jet_order = self.stats.max_jet_order.max(p.max_jet_order());
    }

    pub fn info(&mut self, name: &str, value: String) {
        self.push(Check { name: name.into(), status: CheckStatus::Info, value: Some(value), witnesses: Vec::new() });
    }

    pub fn info_poly(&mut self, name: &str, p: &DiffPolynomial, ctx: &Context) {
        self.track(p);
        self.info(name, to_text(p, ctx));
    }

    pub fn flag(&mut self, name: &str, ok: bool, detail: Option<String>) {
        let status = if ok { CheckStatus::Zero } else { CheckStatus::Nonzero };
        self.push(Check { name: name.into(), status, value: detail, witnesses: Vec::new() });
    }

    /// Exact-zero check over labelled components.
    pub fn zero_check<'a>(
        &mut self,
        name: &str,
        parts: impl IntoIterator<Item = (String, &'a DiffPolynomial)>,
        ctx: &Context,
    ) -> bool {
        let mut witnesses = Vec::new();
        for (at, p) in parts {
            self.track(p);
            if !p.is_zero() {
                witnesses.push(Witness { at, terms: leading_terms(p, ctx) });
            }
        }
        let ok = witnesses.is_empty();
        let status = if ok { CheckStatus::Zero } else { CheckStatus::Nonzero };
        self.push(Check { name: name.into(), status, value: None, witnesses });
        ok
    }

    /// Density-class check; witnesses are the nonzero variational derivatives.
    pub fn class_check(
        &mut self,
        name: &str,
        density: &DiffPolynomial,
        trivial: bool,
        witnesses: &[(String, DiffPolynomial)],
        ctx: &Context,
    ) -> bool {
        self.track(density);
        let status = match (density.is_zero(), trivial) {
            (true, _) => CheckStatus::Zero,
            (false, true) => CheckStatus::Trivial,
            (false, false) => CheckStatus::Nonzero,
        };
        let witnesses = if trivial {
            Vec::new()
        } else {
            witnesses.iter().map(|(at, p)| Witness { at: at.clone(), terms: leading_terms(p, ctx) }).collect()
        };
        self.push(Check { name: name.into(), status, value: None, witnesses });
        trivial
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let verdict = match self.outcome {
            Outcome::Verified => "verified",
            Outcome::Residual => "RESIDUAL",
        };
        let _ = writeln!(s, "{}: {verdict}", self.command);
        for (k, v) in &self.parameters {
            let _ = writeln!(s, "  {k} = {v}");
        }
        for c in &self.checks {
            let status = match c.status {
                CheckStatus::Zero => "zero",
                CheckStatus::Trivial => "trivial class",
                CheckStatus::Nonzero => "NONZERO",
                CheckStatus::Info => "",
            };
            match (&c.value, c.status) {
                (Some(v), CheckStatus::Info) => {
                    let _ = writeln!(s, "  {}: {v}", c.name);
                }
                (Some(v), _) => {
                    let _ = writeln!(s, "  {}: {status} ({v})", c.name);
                }
                (None, _) => {
                    let _ = writeln!(s, "  {}: {status}", c.name);
                }
            }
            for w in &c.witnesses {
                let _ = writeln!(s, "    at {}: {}", w.at, w.terms.join(" , "));
            }
        }
        let _ = writeln!(s, "  [{} terms, max jet order {}]", self.stats.terms, self.stats.max_jet_order);
        s
    }
}

fn leading_terms(p: &DiffPolynomial, ctx: &Context) -> Vec<String> {
    let mut out: Vec<String> = p
        .terms()
        .rev()
        .take(MAX_WITNESSES)
        .map(|(m, c)| to_text(&DiffPolynomial::term(m.clone(), c.clone()), ctx))
        .collect();
    if p.len() > MAX_WITNESSES {
        out.push(format!("... {} more", p.len() - MAX_WITNESSES));
    }
    out
}
