//! Domain types shared by every stage of the pipeline.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the sum of a probability vector.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// A point of the probability simplex over `n >= 2` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidProbabilities(format!(
                "need at least 2 entries, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidProbabilities(format!(
                "entry {i} = {} outside [0, 1]",
                values[i]
            )));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidProbabilities(format!("entries sum to {sum}")));
        }
        Ok(Self(values))
    }

    /// Wraps the output of a numerically stable softmax without re-checking it.
    pub(crate) fn from_softmax(values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= 2);
        Self(values)
    }

    /// Uniform distribution over `n` classes.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest entry.
    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// 1-based index of the largest entry, ties to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax_index(&self.0) + 1
    }
}

/// The plain classifier decision `g(y)`: 1-based index of the maximal entry.
pub fn argmax_decision(y: &ProbabilityVector) -> usize {
    y.argmax()
}

/// 0-based position of the largest value; the first maximum wins.
pub(crate) fn argmax_index(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// An embedding produced by the frozen feature extractor.
///
/// Values are held at 64-bit precision; files store them as 32-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Denomination {
    Eur5,
    Eur10,
    Eur20,
    Eur50,
    Eur100,
    Eur200,
    Eur500,
}

impl Denomination {
    pub const ALL: [Denomination; 7] = [
        Denomination::Eur5,
        Denomination::Eur10,
        Denomination::Eur20,
        Denomination::Eur50,
        Denomination::Eur100,
        Denomination::Eur200,
        Denomination::Eur500,
    ];

    pub fn euros(self) -> u32 {
        match self {
            Denomination::Eur5 => 5,
            Denomination::Eur10 => 10,
            Denomination::Eur20 => 20,
            Denomination::Eur50 => 50,
            Denomination::Eur100 => 100,
            Denomination::Eur200 => 200,
            Denomination::Eur500 => 500,
        }
    }

    pub fn from_euros(euros: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.euros() == euros)
    }

    /// Only the first three denominations appear in both series.
    pub fn has_series(self, series: Series) -> bool {
        match series {
            Series::A => true,
            Series::B => matches!(
                self,
                Denomination::Eur5 | Denomination::Eur10 | Denomination::Eur20
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
}

impl Series {
    fn as_char(self) -> char {
        match self {
            Series::A => 'a',
            Series::B => 'b',
        }
    }
}

/// One of the 40 trained banknote classes, rendered as `EUR_DDD_s_o`.
///
/// Orientation 1..=4: front, front upside down, back, back upside down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BanknoteClassLabel {
    denomination: Denomination,
    series: Series,
    orientation: u8,
}

impl BanknoteClassLabel {
    pub fn new(denomination: Denomination, series: Series, orientation: u8) -> Result<Self> {
        let label = Self {
            denomination,
            series,
            orientation,
        };
        if !(1..=4).contains(&orientation) || !denomination.has_series(series) {
            return Err(Error::UnknownClass(label.to_string()));
        }
        Ok(label)
    }

    pub fn denomination(&self) -> Denomination {
        self.denomination
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn orientation(&self) -> u8 {
        self.orientation
    }

    /// The 40 classes in lexicographic order of their canonical rendering.
    pub fn all() -> &'static [BanknoteClassLabel] {
        static CLASSES: OnceLock<Vec<BanknoteClassLabel>> = OnceLock::new();
        CLASSES.get_or_init(|| {
            let mut classes = Vec::with_capacity(40);
            for d in Denomination::ALL {
                for s in [Series::A, Series::B] {
                    if !d.has_series(s) {
                        continue;
                    }
                    for o in 1..=4 {
                        classes.push(BanknoteClassLabel {
                            denomination: d,
                            series: s,
                            orientation: o,
                        });
                    }
                }
            }
            classes.sort_by_key(|c| c.to_string());
            classes
        })
    }

    /// 1-based position in [`BanknoteClassLabel::all`].
    pub fn index(&self) -> usize {
        Self::all()
            .iter()
            .position(|c| c == self)
            .expect("constructed labels are always canonical")
            + 1
    }

    pub fn from_index(index: usize) -> Option<Self> {
        index
            .checked_sub(1)
            .and_then(|i| Self::all().get(i))
            .copied()
    }
}

impl fmt::Display for BanknoteClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "EUR_{:03}_{}_{}",
            self.denomination.euros(),
            self.series.as_char(),
            self.orientation
        )
    }
}

impl FromStr for BanknoteClassLabel {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let malformed = || Error::MalformedLabel(text.to_string());
        let parts: Vec<&str> = text.split('_').collect();
        let [prefix, digits, series, orientation] = parts.as_slice() else {
            return Err(malformed());
        };
        if *prefix != "EUR" || digits.len() != 3 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let series = match *series {
            "a" => Series::A,
            "b" => Series::B,
            _ => return Err(malformed()),
        };
        let orientation = match orientation.as_bytes() {
            [o @ b'1'..=b'4'] => o - b'0',
            _ => return Err(malformed()),
        };
        let euros: u32 = digits.parse().map_err(|_| malformed())?;
        let denomination =
            Denomination::from_euros(euros).ok_or_else(|| Error::UnknownClass(text.to_string()))?;
        Self::new(denomination, series, orientation)
            .map_err(|_| Error::UnknownClass(text.to_string()))
    }
}

/// Parses a canonical label such as `EUR_005_a_1`.
pub fn parse_class_label(text: &str) -> Result<BanknoteClassLabel> {
    text.parse()
}

/// ECB sorting category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Cat1,
    Cat2,
    Cat3,
    Cat4a,
    Cat4b,
}

/// What a banknote handling machine does with a note of a given category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Disposition {
    RejectToCustomer,
    WithdrawNoCredit,
    WithdrawMayCredit,
    CreditRecirculate,
    CreditReturnToNcb,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Cat1,
        Category::Cat2,
        Category::Cat3,
        Category::Cat4a,
        Category::Cat4b,
    ];

    pub fn disposition(self) -> Disposition {
        match self {
            Category::Cat1 => Disposition::RejectToCustomer,
            Category::Cat2 => Disposition::WithdrawNoCredit,
            Category::Cat3 => Disposition::WithdrawMayCredit,
            Category::Cat4a => Disposition::CreditRecirculate,
            Category::Cat4b => Disposition::CreditReturnToNcb,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Category::Cat1 => "1",
            Category::Cat2 => "2",
            Category::Cat3 => "3",
            Category::Cat4a => "4a",
            Category::Cat4b => "4b",
        };
        f.write_str(s)
    }
}

/// Ground truth of a sample: a banknote class or a category-1 object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SampleLabel {
    /// 1-based class index.
    Class(usize),
    Cat1,
}

impl SampleLabel {
    pub fn class(self) -> Option<usize> {
        match self {
            SampleLabel::Class(c) => Some(c),
            SampleLabel::Cat1 => None,
        }
    }
}

/// Which test population a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Genuine note accepted by the incumbent field classifier.
    AcceptedGenuine,
    /// Genuine note rejected by the incumbent classifier (folded, degraded).
    LegacyRejectedGenuine,
    /// Not a euro banknote: other currency, cheque, double note, transport error.
    NonEuroCat1,
}

impl Provenance {
    pub fn to_u8(self) -> u8 {
        match self {
            Provenance::AcceptedGenuine => 0,
            Provenance::LegacyRejectedGenuine => 1,
            Provenance::NonEuroCat1 => 2,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Provenance::AcceptedGenuine),
            1 => Some(Provenance::LegacyRejectedGenuine),
            2 => Some(Provenance::NonEuroCat1),
            _ => None,
        }
    }

    pub fn is_genuine(self) -> bool {
        self != Provenance::NonEuroCat1
    }
}

/// A feature vector with its ground truth and population tag.
///
/// Category-1 objects never carry a class index, and only they do not.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    features: FeatureVector,
    label: SampleLabel,
    provenance: Provenance,
}

impl LabeledSample {
    pub fn new(
        features: FeatureVector,
        label: SampleLabel,
        provenance: Provenance,
    ) -> Result<Self> {
        if label == SampleLabel::Class(0) {
            return Err(Error::InvalidArgument("class indices are 1-based".into()));
        }
        if label.class().is_some() == (provenance == Provenance::NonEuroCat1) {
            return Err(Error::InvalidArgument(format!(
                "label {label:?} is inconsistent with provenance {provenance:?}"
            )));
        }
        Ok(Self {
            features,
            label,
            provenance,
        })
    }

    /// Convenience constructor for an accepted genuine note of class `class`.
    pub fn genuine(features: FeatureVector, class: usize) -> Result<Self> {
        Self::new(
            features,
            SampleLabel::Class(class),
            Provenance::AcceptedGenuine,
        )
    }

    pub fn features(&self) -> &FeatureVector {
        &self.features
    }

    pub fn label(&self) -> SampleLabel {
        self.label
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn class(&self) -> Option<usize> {
        self.label.class()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn argmax_unique_and_ties() {
        assert_eq!(argmax_decision(&pv(&[0.1, 0.7, 0.2])), 2);
        assert_eq!(argmax_decision(&pv(&[0.5, 0.5])), 1);
        assert_eq!(argmax_decision(&ProbabilityVector::uniform(40).unwrap()), 1);
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![1.0]).is_err());
        assert!(ProbabilityVector::new(vec![0.6, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.1, -0.1]).is_err());
        assert!(ProbabilityVector::new(vec![f64::NAN, 1.0]).is_err());
        assert!(ProbabilityVector::new(vec![0.5, 0.5 + 5e-10]).is_ok());
    }

    #[test]
    fn feature_vector_rejects_non_finite() {
        assert!(matches!(
            FeatureVector::new(vec![0.0, f64::INFINITY]),
            Err(Error::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn parse_example_labels() {
        let l = parse_class_label("EUR_005_a_1").unwrap();
        assert_eq!(
            (l.denomination().euros(), l.series(), l.orientation()),
            (5, Series::A, 1)
        );
        let l = parse_class_label("EUR_500_a_4").unwrap();
        assert_eq!(
            (l.denomination().euros(), l.series(), l.orientation()),
            (500, Series::A, 4)
        );
    }

    #[test]
    fn parse_rejects_invalid() {
        assert!(matches!(
            parse_class_label("EUR_050_b_2"),
            Err(Error::UnknownClass(_))
        ));
        assert!(matches!(
            parse_class_label("EUR_500_b_1"),
            Err(Error::UnknownClass(_))
        ));
        assert!(matches!(
            parse_class_label("EUR_007_a_1"),
            Err(Error::UnknownClass(_))
        ));
        for bad in [
            "",
            "EUR_5_a_1",
            "USD_005_a_1",
            "EUR_005_c_1",
            "EUR_005_a_5",
            "EUR_005_a_1_x",
            "EUR_0x5_a_1",
        ] {
            assert!(
                matches!(parse_class_label(bad), Err(Error::MalformedLabel(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn class_list_is_sorted_and_round_trips() {
        let all = BanknoteClassLabel::all();
        assert_eq!(all.len(), 40);
        let names: Vec<String> = all.iter().map(|c| c.to_string()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert_eq!(names[0], "EUR_005_a_1");
        assert_eq!(names[39], "EUR_500_a_4");
        for (i, name) in names.iter().enumerate() {
            let parsed = parse_class_label(name).unwrap();
            assert_eq!(parsed.to_string(), *name);
            assert_eq!(parsed.index(), i + 1);
            assert_eq!(BanknoteClassLabel::from_index(i + 1), Some(parsed));
        }
        assert_eq!(BanknoteClassLabel::from_index(0), None);
        assert_eq!(BanknoteClassLabel::from_index(41), None);
    }

    #[test]
    fn dispositions() {
        assert_eq!(Category::Cat1.disposition(), Disposition::RejectToCustomer);
        assert_eq!(Category::Cat2.disposition(), Disposition::WithdrawNoCredit);
        assert_eq!(Category::Cat3.disposition(), Disposition::WithdrawMayCredit);
        assert_eq!(
            Category::Cat4a.disposition(),
            Disposition::CreditRecirculate
        );
        assert_eq!(
            Category::Cat4b.disposition(),
            Disposition::CreditReturnToNcb
        );
    }

    #[test]
    fn sample_label_provenance_consistency() {
        let f = FeatureVector::new(vec![0.0]).unwrap();
        assert!(LabeledSample::new(f.clone(), SampleLabel::Cat1, Provenance::NonEuroCat1).is_ok());
        assert!(LabeledSample::new(
            f.clone(),
            SampleLabel::Class(3),
            Provenance::LegacyRejectedGenuine
        )
        .is_ok());
        assert!(
            LabeledSample::new(f.clone(), SampleLabel::Class(3), Provenance::NonEuroCat1).is_err()
        );
        assert!(
            LabeledSample::new(f.clone(), SampleLabel::Cat1, Provenance::AcceptedGenuine).is_err()
        );
        assert!(LabeledSample::new(f, SampleLabel::Class(0), Provenance::AcceptedGenuine).is_err());
    }
}
