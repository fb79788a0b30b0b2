//! ECB category decision and the ECB test procedure evaluator.
//!
//! Authenticity and fitness checks are outside the recognition pipeline; their
//! results are injected as [`CheckOutcome`] values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::head::HeadParams;
use crate::rejector::{self, RejectThreshold, REJECT};
use crate::types::{Category, LabeledSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Authenticity {
    /// One or more security features clearly missing or out of tolerance.
    ClearlyFails,
    /// Some security features cannot clearly be authenticated.
    Unclear,
    Passes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fitness {
    Fit,
    Unfit,
}

/// Result of the class-dependent checks run after recognition.
/// `fitness` only matters when authenticity passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub authenticity: Authenticity,
    pub fitness: Fitness,
}

impl CheckOutcome {
    pub const GENUINE_FIT: CheckOutcome = CheckOutcome {
        authenticity: Authenticity::Passes,
        fitness: Fitness::Fit,
    };
    pub const GENUINE_UNFIT: CheckOutcome = CheckOutcome {
        authenticity: Authenticity::Passes,
        fitness: Fitness::Unfit,
    };
    pub const COUNTERFEIT: CheckOutcome = CheckOutcome {
        authenticity: Authenticity::ClearlyFails,
        fitness: Fitness::Fit,
    };
    pub const SUSPECT: CheckOutcome = CheckOutcome {
        authenticity: Authenticity::Unclear,
        fitness: Fitness::Fit,
    };
}

/// Maps a recognition decision and check results to a category.
pub fn sort_note(decision: usize, checks: CheckOutcome) -> Category {
    if decision == REJECT {
        return Category::Cat1;
    }
    match (checks.authenticity, checks.fitness) {
        (Authenticity::ClearlyFails, _) => Category::Cat2,
        (Authenticity::Unclear, _) => Category::Cat3,
        (Authenticity::Passes, Fitness::Fit) => Category::Cat4a,
        (Authenticity::Passes, Fitness::Unfit) => Category::Cat4b,
    }
}

/// Runs recognition plus rejection on every note of a deck and sorts it,
/// with the check results supplied per note.
pub fn sort_deck<F>(
    head: &HeadParams,
    threshold: RejectThreshold,
    deck: &[LabeledSample],
    mut checks: F,
) -> Result<Vec<Category>>
where
    F: FnMut(usize, &LabeledSample) -> CheckOutcome,
{
    deck.iter()
        .enumerate()
        .map(|(i, s)| {
            let y = head.forward(s.features())?;
            Ok(sort_note(rejector::apply(&y, threshold), checks(i, s)))
        })
        .collect()
}

/// Per-category note counts of one deck.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryHistogram {
    pub cat1: usize,
    pub cat2: usize,
    pub cat3: usize,
    pub cat4a: usize,
    pub cat4b: usize,
}

impl CategoryHistogram {
    pub fn from_categories(categories: &[Category]) -> Self {
        let mut h = Self::default();
        for c in categories {
            *h.slot(*c) += 1;
        }
        h
    }

    fn slot(&mut self, c: Category) -> &mut usize {
        match c {
            Category::Cat1 => &mut self.cat1,
            Category::Cat2 => &mut self.cat2,
            Category::Cat3 => &mut self.cat3,
            Category::Cat4a => &mut self.cat4a,
            Category::Cat4b => &mut self.cat4b,
        }
    }

    pub fn get(&self, c: Category) -> usize {
        match c {
            Category::Cat1 => self.cat1,
            Category::Cat2 => self.cat2,
            Category::Cat3 => self.cat3,
            Category::Cat4a => self.cat4a,
            Category::Cat4b => self.cat4b,
        }
    }

    pub fn total(&self) -> usize {
        self.cat1 + self.cat2 + self.cat3 + self.cat4a + self.cat4b
    }
}

/// The four pass/fail criteria of the test procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criteria {
    /// At least 90% of counterfeits in category 2 or 3 and none in category 4.
    pub counterfeit_detection: bool,
    /// At most 5% of unfit notes in category 4a.
    pub unfit_leakage: bool,
    /// At least 90% of fit genuine notes in category 4a.
    pub fit_acceptance: bool,
    /// At most 1% of fit genuine notes in category 1, 2 or 3.
    pub genuine_reject: bool,
}

impl Criteria {
    pub fn all(&self) -> bool {
        self.counterfeit_detection
            && self.unfit_leakage
            && self.fit_acceptance
            && self.genuine_reject
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeckReport {
    pub counterfeit: CategoryHistogram,
    pub unfit: CategoryHistogram,
    pub fit: CategoryHistogram,
    pub criteria: Criteria,
    pub pass: bool,
}

impl DeckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Evaluates sorted test decks against the ECB criteria.
///
/// Percent bounds are compared in exact integer arithmetic and are inclusive.
pub fn ecb_test(
    counterfeit: &[Category],
    unfit: &[Category],
    fit: &[Category],
) -> Result<DeckReport> {
    if counterfeit.is_empty() {
        return Err(Error::Empty("counterfeit deck"));
    }
    if unfit.is_empty() {
        return Err(Error::Empty("unfit deck"));
    }
    if fit.is_empty() {
        return Err(Error::Empty("fit deck"));
    }
    let cf = CategoryHistogram::from_categories(counterfeit);
    let un = CategoryHistogram::from_categories(unfit);
    let fi = CategoryHistogram::from_categories(fit);

    let criteria = Criteria {
        counterfeit_detection: 100 * (cf.cat2 + cf.cat3) >= 90 * cf.total()
            && cf.cat4a + cf.cat4b == 0,
        unfit_leakage: 100 * un.cat4a <= 5 * un.total(),
        fit_acceptance: 100 * fi.cat4a >= 90 * fi.total(),
        genuine_reject: 100 * (fi.cat1 + fi.cat2 + fi.cat3) <= fi.total(),
    };
    Ok(DeckReport {
        counterfeit: cf,
        unfit: un,
        fit: fi,
        criteria,
        pass: criteria.all(),
    })
}
