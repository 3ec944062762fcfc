use std::fmt;

use thiserror::Error;

use super::{forms, mu, theorem_invariant, LinearFormBank, FE_BRACKET, FE_GROUPED, F_BRACKET, MU_VIA_BDG, MU_VIA_CHF};
use crate::anf::{parse, Instance, Polynomial, Substitution, VarId};
use crate::boolfun::BoolFun6;
use crate::cipher::{RoundMode, RoundSystem, TheoremHypothesis, Wiring};
use crate::fe::{build_fe, check_invariant_empirically};

/// Random states used by the empirical cross-check of the last step.
pub const EMPIRICAL_TRIALS: u64 = 1 << 16;
const EMPIRICAL_SEED: u64 = 0x7310;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("wiring violates {}", .0.iter().map(|h| h.describe()).collect::<Vec<_>>().join(" and "))]
pub struct HypothesisError(pub Vec<TheoremHypothesis>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ProofStep {
    /// Round images of the eight forms.
    FormImages,
    /// The FE regrouped as `mu` times a bracket in `Y`, `W`.
    Regrouping,
    /// `BDG*Y = BDG`, `CHF*W = CHF`.
    Absorption,
    /// `(B+1)(D+1)(G+1)*Y = ...`, `(C+1)(H+1)(F+1)*W = ...`.
    ComplementAbsorption,
    /// The two factorizations of `mu`.
    MuFactorizations,
    /// `Y*mu = mu`, `W*mu = mu`.
    MuAbsorbs,
    /// `mu * f_bracket = 0`.
    Bracket,
    /// The FE itself, plus a randomized cross-check.
    EndToEnd,
}

impl ProofStep {
    pub fn label(self) -> &'static str {
        match self {
            ProofStep::FormImages => "i",
            ProofStep::Regrouping => "ii",
            ProofStep::Absorption => "iii",
            ProofStep::ComplementAbsorption => "iv",
            ProofStep::MuFactorizations => "v",
            ProofStep::MuAbsorbs => "vi",
            ProofStep::Bracket => "vii",
            ProofStep::EndToEnd => "viii",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            ProofStep::FormImages => "form images H->A+W, D->E+Y and trivial shifts",
            ProofStep::Regrouping => "FE = mu * [bracket in Y, W]",
            ProofStep::Absorption => "BDG*Y = BDG and CHF*W = CHF",
            ProofStep::ComplementAbsorption => "(B+1)(D+1)(G+1)*Y and (C+1)(H+1)(F+1)*W absorbed",
            ProofStep::MuFactorizations => "two factorizations of mu",
            ProofStep::MuAbsorbs => "Y*mu = mu and W*mu = mu",
            ProofStep::Bracket => "mu * f_bracket = 0",
            ProofStep::EndToEnd => "FE = 0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepResult {
    pub step: ProofStep,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofReport {
    pub steps: Vec<StepResult>,
    /// Whether the invariant checked end to end is the theorem's.
    pub full_chain: bool,
}

impl ProofReport {
    pub fn all_passed(&self) -> bool {
        self.steps.iter().all(|s| s.passed)
    }

    pub fn step(&self, step: ProofStep) -> Option<&StepResult> {
        self.steps.iter().find(|s| s.step == step)
    }

    pub fn end_to_end(&self) -> bool {
        self.step(ProofStep::EndToEnd).is_some_and(|s| s.passed)
    }
}

impl fmt::Display for ProofReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            let verdict = if s.passed { "PASS" } else { "FAIL" };
            writeln!(f, "step {:<4} {verdict}  {}: {}", s.step.label(), s.step.title(), s.detail)?;
        }
        f.write_str(if self.all_passed() { "ALL STEPS PASS" } else { "SOME STEPS FAIL" })
    }
}

fn holds(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

fn check_hypotheses(w: &Wiring) -> Result<(), HypothesisError> {
    let failed: Vec<_> = TheoremHypothesis::ALL.into_iter().filter(|&h| !w.hypothesis(h)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(HypothesisError(failed))
    }
}

/// `f` times `(Z+1)` vanishes, with `Z` the function over its arguments `a..f`.
fn annihilates_complement(f: &BoolFun6, g: &str) -> bool {
    f.to_polynomial().complement().mul(&parse(g).expect("fixture parses")).is_zero()
}

struct Context {
    bank: LinearFormBank,
    placeholder: RoundSystem,
    y: Polynomial,
    w: Polynomial,
}

impl Context {
    fn new(wiring: &Wiring, f: &BoolFun6) -> Self {
        Context {
            bank: LinearFormBank::standard(),
            placeholder: RoundSystem::new(wiring, RoundMode::Placeholder),
            y: f.instantiate(&wiring.instance_args(Instance::Y)),
            w: f.instantiate(&wiring.instance_args(Instance::W)),
        }
    }

    fn state(&self, text: &str) -> Polynomial {
        self.bank.expand(&forms(text))
    }

    fn absorbs(&self, g: &str, z: &Polynomial) -> bool {
        let g = self.state(g);
        g.mul(z) == g
    }

    fn form_images(&self) -> StepResult {
        let subst = self.placeholder.placeholder_substitution();
        let images = LinearFormBank::round_images();
        let bad: Vec<char> = (0..8)
            .filter(|&k| self.bank.form(k).substitute(&subst) != self.bank.expand(&images[k]))
            .map(|k| LinearFormBank::LETTERS[k])
            .collect();
        StepResult {
            step: ProofStep::FormImages,
            passed: bad.is_empty(),
            detail: if bad.is_empty() {
                "all 8 images match".into()
            } else {
                format!("mismatched images: {}", bad.iter().collect::<String>())
            },
        }
    }

    fn absorption(&self, f: &BoolFun6) -> StepResult {
        let ann = annihilates_complement(f, "(f+e)(d+a)(b+c)");
        let y = self.absorbs("BDG", &self.y);
        let w = self.absorbs("CHF", &self.w);
        StepResult {
            step: ProofStep::Absorption,
            passed: y && w,
            detail: format!("(Z+1)(f+e)(d+a)(b+c)=0 {}; BDG*Y {}; CHF*W {}", holds(ann), holds(y), holds(w)),
        }
    }

    fn complement_absorption(&self, f: &BoolFun6) -> StepResult {
        let ann = annihilates_complement(f, "(f+e+1)(d+a+1)(b+c+1)");
        let y = self.absorbs("(B+1)(D+1)(G+1)", &self.y);
        let w = self.absorbs("(C+1)(H+1)(F+1)", &self.w);
        StepResult {
            step: ProofStep::ComplementAbsorption,
            passed: y && w,
            detail: format!(
                "(Z+1)(f+e+1)(d+a+1)(b+c+1)=0 {}; (B+1)(D+1)(G+1)*Y {}; (C+1)(H+1)(F+1)*W {}",
                holds(ann),
                holds(y),
                holds(w)
            ),
        }
    }

    fn end_to_end(&self, p: &Polynomial, wiring: &Wiring, f: &BoolFun6) -> StepResult {
        let rs = RoundSystem::new(wiring, RoundMode::Expanded(*f));
        let report = build_fe(p, &rs).expect("state polynomial, no budget");
        let emp = check_invariant_empirically(p, wiring, f, EMPIRICAL_TRIALS, EMPIRICAL_SEED).expect("state polynomial");
        StepResult {
            step: ProofStep::EndToEnd,
            passed: report.is_zero,
            detail: format!(
                "FE has {} terms; {} of {} random states change P",
                report.fe.len(),
                emp.mismatches,
                emp.trials
            ),
        }
    }
}

/// Checks the eight steps of the degree-7 argument for one wiring and function.
pub fn verify_proof_chain(wiring: &Wiring, f: &BoolFun6) -> Result<ProofReport, HypothesisError> {
    check_hypotheses(wiring)?;
    let cx = Context::new(wiring, f);
    let mu_s = cx.bank.expand(&mu());
    let mut steps = vec![cx.form_images()];

    // P + P(round images), over A..H with Y and W symbolic
    let p = super::theorem_invariant_forms();
    let images: Substitution = (0..8).map(VarId::form).zip(LinearFormBank::round_images()).collect();
    let fe_abstract = p.add(&p.substitute(&images));
    let grouped = fe_abstract == forms(FE_GROUPED);
    let factored = fe_abstract == mu().mul(&forms(FE_BRACKET));
    let fe_placeholder = build_fe(&theorem_invariant(), &cx.placeholder).expect("no budget").fe;
    let lifted = fe_placeholder == cx.bank.expand(&fe_abstract);
    steps.push(StepResult {
        step: ProofStep::Regrouping,
        passed: grouped && factored && lifted,
        detail: format!(
            "(G+H)(F+G)[..] form {}; mu*[bracket] form {}; matches placeholder FE of the wiring: {}",
            holds(grouped),
            holds(factored),
            if lifted { "yes" } else { "no" }
        ),
    });

    steps.push(cx.absorption(f));
    steps.push(cx.complement_absorption(f));

    let via_bdg = mu() == forms(MU_VIA_BDG);
    let via_chf = mu() == forms(MU_VIA_CHF);
    steps.push(StepResult {
        step: ProofStep::MuFactorizations,
        passed: via_bdg && via_chf,
        detail: format!("via BDG {}; via CHF {}", holds(via_bdg), holds(via_chf)),
    });

    let y = cx.y.mul(&mu_s) == mu_s;
    let w = cx.w.mul(&mu_s) == mu_s;
    steps.push(StepResult {
        step: ProofStep::MuAbsorbs,
        passed: y && w,
        detail: format!("Y*mu {}; W*mu {}", holds(y), holds(w)),
    });

    let ones: Substitution = [Instance::Y, Instance::W]
        .into_iter()
        .map(|i| (VarId::placeholder(i), Polynomial::one()))
        .collect();
    let specialized = forms(FE_BRACKET).substitute(&ones) == forms(F_BRACKET);
    let vanishes = mu().mul(&forms(F_BRACKET)).is_zero();
    steps.push(StepResult {
        step: ProofStep::Bracket,
        passed: specialized && vanishes,
        detail: format!(
            "bracket at Y=W=1 equals f_bracket: {}; mu*f_bracket = 0 {}",
            if specialized { "yes" } else { "no" },
            holds(vanishes)
        ),
    });

    steps.push(cx.end_to_end(&theorem_invariant(), wiring, f));
    Ok(ProofReport { steps, full_chain: true })
}

/// Runs the full chain for the theorem's invariant; for any other invariant,
/// only the steps that do not depend on it plus the end-to-end check.
pub fn verify_invariant(wiring: &Wiring, f: &BoolFun6, p: &Polynomial) -> Result<ProofReport, HypothesisError> {
    if *p == theorem_invariant() {
        return verify_proof_chain(wiring, f);
    }
    check_hypotheses(wiring)?;
    let cx = Context::new(wiring, f);
    let steps = vec![cx.form_images(), cx.absorption(f), cx.complement_absorption(f), cx.end_to_end(p, wiring, f)];
    Ok(ProofReport { steps, full_chain: false })
}
