//! Command dispatch shared by the CLI and tests.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::check::{Mode, Violation};
use crate::coalgebra::{
    check_bracket_lifts, check_coderivation_axiom, check_decomposition, check_dual_leibniz,
    check_round_trip,
};
use crate::derived::{
    build_sh_structure, check_adjoint_subcomplex, check_bracket_routes, check_codifferential,
    check_key_lemma, check_partial_routes, check_sh_leibniz, codifferential,
    derivation_spanning_set, derived_bracket, leibniz_cohomology_check, vacuous_consts,
    DeformationFamily,
};
use crate::error::{Error, Result};
use crate::gauge::{check_deformation, check_gauge_equivalence, gauge_transform, mc_residual};
use crate::io::document::{serialize_document, AlgebraDocument, AlgebraModel};
use crate::io::report::{CheckReport, Report};
use crate::leibniz::{
    check_closure, check_derivation, check_differential, check_leibniz_identity_with,
    check_rearrangement_exhaustive, check_skewsymmetry,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    CheckLeibniz,
    CheckDeformation,
    Derive,
    CheckSh,
    CheckCodifferential,
    CheckKeyLemma,
    Gauge,
    CheckGaugeEquivalence,
    CheckCoalgebra,
    ReportAll,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::Validate,
        Command::CheckLeibniz,
        Command::CheckDeformation,
        Command::Derive,
        Command::CheckSh,
        Command::CheckCodifferential,
        Command::CheckKeyLemma,
        Command::Gauge,
        Command::CheckGaugeEquivalence,
        Command::CheckCoalgebra,
        Command::ReportAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::CheckLeibniz => "check-leibniz",
            Command::CheckDeformation => "check-deformation",
            Command::Derive => "derive",
            Command::CheckSh => "check-sh",
            Command::CheckCodifferential => "check-codifferential",
            Command::CheckKeyLemma => "check-key-lemma",
            Command::Gauge => "gauge",
            Command::CheckGaugeEquivalence => "check-gauge-equivalence",
            Command::CheckCoalgebra => "check-coalgebra",
            Command::ReportAll => "report-all",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown command `{s}`")))
    }
}

/// Bounds for the exhaustive checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Largest `Const = i + j` for the sh Leibniz identity.
    pub max_const: usize,
    /// Longest tensor word in coalgebra checks.
    pub max_word_len: usize,
    /// Bound on both `i` and `j` in the key lemma and on `i` in the
    /// cohomology checks; also the largest `n` in the rearrangement identity.
    pub max_arity: usize,
    pub mode: Mode,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_const: 6,
            max_word_len: 4,
            max_arity: 3,
            mode: Mode::Exhaustive,
        }
    }
}

impl RunOptions {
    fn validate(&self) -> Result<()> {
        if !(2..=8).contains(&self.max_const) {
            return Err(Error::Scope(format!(
                "max-const must be in 2..=8, got {}",
                self.max_const
            )));
        }
        if !(1..=6).contains(&self.max_word_len) {
            return Err(Error::Scope(format!(
                "max-word-len must be in 1..=6, got {}",
                self.max_word_len
            )));
        }
        if !(1..=5).contains(&self.max_arity) {
            return Err(Error::Scope(format!(
                "max-arity must be in 1..=5, got {}",
                self.max_arity
            )));
        }
        Ok(())
    }
}

struct Runner<'a> {
    model: AlgebraModel,
    doc: &'a AlgebraDocument,
    opts: RunOptions,
    checks: Vec<CheckReport>,
    output: Option<String>,
}

impl Runner<'_> {
    /// False once a check failed in first-violation mode.
    fn live(&self) -> bool {
        !(self.opts.mode == Mode::FirstViolation && self.checks.iter().any(|c| !c.passes()))
    }

    fn push(&mut self, name: &str, scope: &[(&str, i64)], found: &[Violation]) {
        let report = CheckReport::from_violations(name, scope, found, &self.model.basis);
        self.checks.push(report);
    }

    /// The deformation, or a failed Maurer-Cartan check.
    fn family(&mut self) -> Result<Option<DeformationFamily>> {
        match self.model.family() {
            Ok(f) => Ok(Some(f)),
            Err(Error::NotMaurerCartan { order }) => {
                let theta = self.model.theta.as_ref().expect("theta sections present");
                let res = mc_residual(&self.model.bracket, &self.model.deltas[0], theta, order);
                let note = format!(
                    "residual at order {order}: {}",
                    res.render(&self.model.basis)
                );
                self.checks.push(CheckReport::failed(
                    "maurer-cartan",
                    &[("order", order as i64)],
                    note,
                ));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    fn validate(&mut self) -> Result<()> {
        let found = check_leibniz_identity_with(&self.model.bracket, self.opts.mode)?;
        self.push("leibniz", &[], &found);
        if let Some(gauge) = self.model.gauge.clone() {
            for (j, xi) in gauge.xis().iter().enumerate() {
                if !self.live() {
                    return Ok(());
                }
                let found = check_derivation(xi, &self.model.bracket)?;
                self.push("gauge-derivation", &[("j", j as i64 + 1)], &found);
            }
        }
        if let Some(theta) = self.model.theta.clone() {
            if !self.live() {
                return Ok(());
            }
            let Some(_) = self.family()? else {
                return Ok(());
            };
            self.checks.push(CheckReport::from_violations(
                "maurer-cartan",
                &[("max_order", theta.order() as i64)],
                &[],
                &self.model.basis,
            ));
        }
        self.deformation()
    }

    fn deformation(&mut self) -> Result<()> {
        if !self.live() {
            return Ok(());
        }
        let Some(fam) = self.family()? else {
            return Ok(());
        };
        let found = check_deformation(&self.model.bracket, &fam)?;
        self.push("deformation", &[("max_order", fam.order() as i64)], &found);
        Ok(())
    }

    fn leibniz(&mut self) -> Result<()> {
        let bracket = self.model.bracket.clone();
        let found = check_leibniz_identity_with(&bracket, self.opts.mode)?;
        self.push("leibniz", &[], &found);
        if !self.live() {
            return Ok(());
        }
        let found = check_rearrangement_exhaustive(&bracket, self.opts.max_arity)?;
        self.push(
            "rearrangement",
            &[("max_n", self.opts.max_arity as i64)],
            &found,
        );
        for (k, d) in self.model.deltas.clone().iter().enumerate() {
            if !self.live() || !check_differential(d, &bracket)?.passes() {
                continue;
            }
            let derived = derived_bracket(&bracket, d, 2)?;
            let found = check_leibniz_identity_with(&derived, self.opts.mode)?;
            self.push("shifted-leibniz", &[("delta", k as i64)], &found);
        }
        Ok(())
    }

    fn derive(&mut self, emit: bool) -> Result<()> {
        let Some(fam) = self.family()? else {
            return Ok(());
        };
        let bracket = self.model.bracket.clone();
        for (k, d) in fam.deltas().iter().enumerate() {
            let i = k + 1;
            if !self.live() {
                return Ok(());
            }
            let found = check_bracket_routes(&bracket, d, i)?;
            self.push("bracket-routes", &[("i", i as i64)], &found);
            let found = check_partial_routes(&bracket, d, i)?;
            self.push("partial-routes", &[("i", i as i64)], &found);
        }
        if emit {
            let structure = build_sh_structure(&bracket, &fam)?;
            let mut out = String::new();
            for (k, op) in structure.ops().iter().enumerate() {
                out.push_str(&format!("[l {}] degree {}\n", k + 1, op.degree()));
                let table = op.render_table();
                if !table.is_empty() {
                    out.push_str(&table);
                    out.push('\n');
                }
            }
            self.output = Some(out);
        }
        Ok(())
    }

    fn sh(&mut self) -> Result<()> {
        let Some(fam) = self.family()? else {
            return Ok(());
        };
        let structure = build_sh_structure(&self.model.bracket, &fam)?;
        let found = check_sh_leibniz(&structure, self.opts.max_const, self.opts.mode)?;
        let vacuous = vacuous_consts(&structure, self.opts.max_const);
        for c in 2..=self.opts.max_const {
            if !self.live() {
                return Ok(());
            }
            let at: Vec<Violation> = found
                .iter()
                .filter(|v| v.scope_value("const") == Some(c as i64))
                .cloned()
                .collect();
            let mut report = CheckReport::from_violations(
                "sh-leibniz",
                &[("const", c as i64)],
                &at,
                &self.model.basis,
            );
            if vacuous.contains(&c) {
                report = report.with_note("no pair of non-zero brackets contributes");
            }
            self.checks.push(report);
        }
        if let Some(sub) = self.model.named_subset("subalgebra")? {
            for (k, op) in structure.ops().iter().enumerate() {
                if !self.live() {
                    return Ok(());
                }
                let mut found = check_closure(op, &sub);
                if op.arity() >= 2 {
                    found.extend(check_skewsymmetry(op, &sub)?);
                }
                self.push("sh-lie-restriction", &[("i", k as i64 + 1)], &found);
            }
        }
        Ok(())
    }

    fn codiff(&mut self) -> Result<()> {
        let Some(fam) = self.family()? else {
            return Ok(());
        };
        let len = self.opts.max_word_len;
        let found = check_codifferential(&self.model.bracket, &fam, len, self.opts.mode)?;
        self.push("codifferential-square", &[("max_len", len as i64)], &found);
        Ok(())
    }

    fn key_lemma(&mut self) -> Result<()> {
        let bracket = self.model.bracket.clone();
        let ders = derivation_spanning_set(&bracket)?;
        let n = self.opts.max_arity;
        for i in 1..=n {
            for j in 1..=n {
                if !self.live() {
                    return Ok(());
                }
                let mut found = Vec::new();
                'pairs: for d in &ders {
                    for d2 in &ders {
                        found.extend(check_key_lemma(&bracket, d, d2, i, j)?);
                        if self.opts.mode == Mode::FirstViolation && !found.is_empty() {
                            break 'pairs;
                        }
                    }
                }
                let report = CheckReport::from_violations(
                    "key-lemma",
                    &[("i", i as i64), ("j", j as i64)],
                    &found,
                    &self.model.basis,
                )
                .with_note(format!("{} derivations", ders.len()));
                self.checks.push(report);
            }
        }
        if !self.live() {
            return Ok(());
        }
        let Some(fam) = self.family()? else {
            return Ok(());
        };
        if fam.order() >= 1 && check_differential(&fam.delta(1), &bracket)?.passes() {
            let delta1 = fam.delta(1);
            let found = leibniz_cohomology_check(&bracket, &delta1, &ders, n)?;
            self.push("cohomology-map", &[("max_i", n as i64)], &found);
            let found = check_adjoint_subcomplex(&bracket, &delta1, n)?;
            self.push("adjoint-subcomplex", &[("max_i", n as i64)], &found);
        }
        Ok(())
    }

    fn require_gauge(&self) -> Result<crate::gauge::GaugeFamily> {
        self.model
            .gauge
            .clone()
            .ok_or_else(|| Error::Precondition("the document has no gauge sections".into()))
    }

    fn gauge(&mut self, emit: bool) -> Result<()> {
        let gauge = self.require_gauge()?;
        let Some(fam) = self.family()? else {
            return Ok(());
        };
        for (j, xi) in gauge.xis().iter().enumerate() {
            let found = check_derivation(xi, &self.model.bracket)?;
            self.push("gauge-derivation", &[("j", j as i64 + 1)], &found);
        }
        if !self.live() {
            return Ok(());
        }
        let transformed = gauge_transform(&fam, &gauge)?;
        let found = check_deformation(&self.model.bracket, &transformed)?;
        self.push(
            "transformed-deformation",
            &[("max_order", transformed.order() as i64)],
            &found,
        );
        if emit {
            self.output = Some(serialize_document(&self.doc.with_family(&transformed)));
        }
        Ok(())
    }

    fn gauge_equivalence(&mut self) -> Result<()> {
        let gauge = self.require_gauge()?;
        let Some(fam) = self.family()? else {
            return Ok(());
        };
        let len = self.opts.max_word_len;
        let verdict = check_gauge_equivalence(&self.model.bracket, &fam, &gauge, len)?;
        for (name, found) in verdict.named() {
            self.push(&format!("gauge-{name}"), &[("max_len", len as i64)], found);
        }
        Ok(())
    }

    fn coalgebra(&mut self) -> Result<()> {
        let len = self.opts.max_word_len;
        let basis = self.model.basis.clone();
        let found = check_dual_leibniz(&basis, len);
        self.push("dual-leibniz", &[("max_len", len as i64)], &found);
        let Some(fam) = self.family()? else {
            return Ok(());
        };
        let d = codifferential(&self.model.bracket, &fam)?;
        let found = check_coderivation_axiom(&d, &basis, len);
        self.push("coderivation-axiom", &[("max_len", len as i64)], &found);
        let comps: Vec<_> = d.components().cloned().collect();
        for f in &comps {
            if !self.live() {
                return Ok(());
            }
            let arity = f.arity() as i64;
            let found = check_decomposition(f, len);
            self.push(
                "lift-decomposition",
                &[("arity", arity), ("max_len", len as i64)],
                &found,
            );
            let found = check_round_trip(f)?;
            self.push("lift-round-trip", &[("arity", arity)], &found);
        }
        for f in &comps {
            for g in &comps {
                if !self.live() {
                    return Ok(());
                }
                let found = check_bracket_lifts(f, g, len)?;
                self.push(
                    "bracket-of-lifts",
                    &[
                        ("arity_f", f.arity() as i64),
                        ("arity_g", g.arity() as i64),
                        ("max_len", len as i64),
                    ],
                    &found,
                );
            }
        }
        Ok(())
    }

    fn run(&mut self, cmd: Command) -> Result<()> {
        match cmd {
            Command::Validate => self.validate(),
            Command::CheckLeibniz => self.leibniz(),
            Command::CheckDeformation => self.deformation(),
            Command::Derive => self.derive(true),
            Command::CheckSh => self.sh(),
            Command::CheckCodifferential => self.codiff(),
            Command::CheckKeyLemma => self.key_lemma(),
            Command::Gauge => self.gauge(true),
            Command::CheckGaugeEquivalence => self.gauge_equivalence(),
            Command::CheckCoalgebra => self.coalgebra(),
            Command::ReportAll => {
                let mut steps: Vec<fn(&mut Self) -> Result<()>> = vec![
                    Self::validate,
                    Self::leibniz,
                    |r| r.derive(false),
                    Self::sh,
                    Self::codiff,
                    Self::key_lemma,
                    Self::coalgebra,
                ];
                if self.model.gauge.is_some() {
                    steps.push(|r| r.gauge(false));
                    steps.push(Self::gauge_equivalence);
                }
                for step in steps {
                    if !self.live() {
                        break;
                    }
                    step(self)?;
                    if self
                        .checks
                        .iter()
                        .any(|c| c.name == "maurer-cartan" && !c.passes())
                    {
                        break;
                    }
                }
                let mut seen = std::collections::BTreeSet::new();
                self.checks
                    .retain(|c| seen.insert((c.name.clone(), c.scope.clone())));
                Ok(())
            }
        }
    }
}

/// Runs `cmd` on a parsed document. Errors are problems with the input or
/// the options (the CLI maps them to exit code 2); a failing identity is a
/// report with verdict `fail`.
pub fn run_command(cmd: Command, doc: &AlgebraDocument, opts: &RunOptions) -> Result<Report> {
    opts.validate()?;
    let start = Instant::now();
    let mut runner = Runner {
        model: doc.model()?,
        doc,
        opts: *opts,
        checks: Vec::new(),
        output: None,
    };
    runner.run(cmd)?;
    let elapsed = start.elapsed().as_millis() as u64;
    Ok(Report::new(
        cmd.name(),
        runner.checks,
        elapsed,
        runner.output,
    ))
}
