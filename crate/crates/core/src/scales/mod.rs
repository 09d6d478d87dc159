//! Category codes, the RILE left/right/other mapping, RILE scoring and
//! five-way stance bins.

pub mod registry;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baseline::PredictionSet;
use crate::corpus::Manifesto;
use crate::error::{Error, Result};
use crate::num::{from_f64, Scalar};

/// A validated category code in canonical form: `0`, `ddd` or `ddd.d`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CategoryCode(String);

impl CategoryCode {
    /// Normalizes a raw annotation value.
    ///
    /// Heading markers (`H`) and blank or `NA` values become the residual
    /// code `0`. Four-digit catalogue ids of the additional categories are
    /// rewritten to dotted form and known aliases to their canonical code.
    pub fn normalize(raw: &str) -> Result<Self> {
        let trimmed = raw.trim();
        if trimmed.is_empty()
            || trimmed.eq_ignore_ascii_case("h")
            || trimmed.eq_ignore_ascii_case("na")
            || trimmed.eq_ignore_ascii_case("n/a")
            || trimmed.eq_ignore_ascii_case("nan")
        {
            return Ok(CategoryCode("0".to_owned()));
        }
        registry::canonicalize(trimmed)
            .map(|c| CategoryCode(c.to_owned()))
            .ok_or_else(|| Error::UnknownCode(raw.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn major(&self) -> MajorCode {
        major_code(self)
    }

    pub fn is_residual(&self) -> bool {
        self.0 == "0"
    }
}

impl TryFrom<String> for CategoryCode {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        CategoryCode::normalize(&value)
    }
}

impl From<CategoryCode> for String {
    fn from(c: CategoryCode) -> String {
        c.0
    }
}

impl FromStr for CategoryCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CategoryCode::normalize(s)
    }
}

impl fmt::Display for CategoryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A major category code: `0` or three digits, never a decimal part.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MajorCode(String);

impl MajorCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for MajorCode {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        let ok = value == "0" || (value.len() == 3 && value.bytes().all(|b| b.is_ascii_digit()));
        if ok && registry::is_registered(&value) {
            Ok(MajorCode(value))
        } else {
            Err(Error::UnknownCode(value))
        }
    }
}

impl From<MajorCode> for String {
    fn from(c: MajorCode) -> String {
        c.0
    }
}

impl fmt::Display for MajorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Rolls a subcategory up to its major category by truncating at the
/// decimal point.
pub fn major_code(code: &CategoryCode) -> MajorCode {
    let raw = code.as_str();
    let major = raw.split_once('.').map_or(raw, |(m, _)| m);
    MajorCode(major.to_owned())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RileClass {
    Left,
    Right,
    Other,
}

impl RileClass {
    pub const ALL: [RileClass; 3] = [RileClass::Left, RileClass::Right, RileClass::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            RileClass::Left => "Left",
            RileClass::Right => "Right",
            RileClass::Other => "Other",
        }
    }

    /// Swaps Left and Right, keeping Other.
    pub fn mirrored(self) -> Self {
        match self {
            RileClass::Left => RileClass::Right,
            RileClass::Right => RileClass::Left,
            RileClass::Other => RileClass::Other,
        }
    }
}

impl fmt::Display for RileClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RileClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(RileClass::Left),
            "right" | "r" => Ok(RileClass::Right),
            "other" | "o" => Ok(RileClass::Other),
            _ => Err(Error::UnknownLabel(s.to_owned())),
        }
    }
}

/// A left/right scale defined by two disjoint sets of major codes. Every
/// other major code counts as Other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RileScale {
    pub name: String,
    pub right: BTreeSet<MajorCode>,
    pub left: BTreeSet<MajorCode>,
}

impl RileScale {
    /// The standard RILE scale.
    pub fn standard() -> Self {
        let set = |codes: &[&str]| codes.iter().map(|c| MajorCode((*c).to_owned())).collect();
        RileScale {
            name: "rile".to_owned(),
            right: set(&registry::RILE_RIGHT),
            left: set(&registry::RILE_LEFT),
        }
    }

    /// Loads a custom scale from JSON with the same shape as the dump.
    pub fn from_json(json: &str) -> Result<Self> {
        let scale: RileScale = serde_json::from_str(json)?;
        scale.validate()?;
        Ok(scale)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(shared) = self.right.intersection(&self.left).next() {
            return Err(Error::data(format!(
                "scale {:?}: code {shared} is in both the right and left sets",
                self.name
            )));
        }
        if self.right.iter().chain(&self.left).any(|c| c.as_str() == "0") {
            return Err(Error::data(format!(
                "scale {:?}: the residual code cannot be on a pole",
                self.name
            )));
        }
        Ok(())
    }

    pub fn class_of(&self, code: &CategoryCode) -> RileClass {
        let major = major_code(code);
        if self.right.contains(&major) {
            RileClass::Right
        } else if self.left.contains(&major) {
            RileClass::Left
        } else {
            RileClass::Other
        }
    }

    /// Resolves a predicted label, which is either a class name or a
    /// category code.
    pub fn class_of_label(&self, label: &str) -> Result<RileClass> {
        if let Ok(class) = label.parse::<RileClass>() {
            return Ok(class);
        }
        let code = CategoryCode::normalize(label).map_err(|_| Error::UnknownLabel(label.to_owned()))?;
        Ok(self.class_of(&code))
    }
}

impl Default for RileScale {
    fn default() -> Self {
        RileScale::standard()
    }
}

/// Class of a code under the standard RILE scale.
pub fn rile_class(code: &CategoryCode) -> RileClass {
    let major = major_code(code);
    if registry::RILE_RIGHT.contains(&major.as_str()) {
        RileClass::Right
    } else if registry::RILE_LEFT.contains(&major.as_str()) {
        RileClass::Left
    } else {
        RileClass::Other
    }
}

/// Counts of right, left and other statements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RileTally {
    pub right: u64,
    pub left: u64,
    pub other: u64,
}

impl RileTally {
    pub fn new(right: u64, left: u64, other: u64) -> Self {
        RileTally { right, left, other }
    }

    pub fn total(&self) -> u64 {
        self.right + self.left + self.other
    }

    pub fn add(&mut self, class: RileClass) {
        match class {
            RileClass::Right => self.right += 1,
            RileClass::Left => self.left += 1,
            RileClass::Other => self.other += 1,
        }
    }

    pub fn from_classes<I: IntoIterator<Item = RileClass>>(classes: I) -> Self {
        let mut tally = RileTally::default();
        classes.into_iter().for_each(|c| tally.add(c));
        tally
    }

    pub fn score<T: Scalar>(&self) -> Result<RileScore<T>> {
        rile_score(self)
    }
}

/// A RILE value in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RileScore<T>(T);

impl<T: Scalar> RileScore<T> {
    pub fn new(value: T) -> Result<Self> {
        if value.is_finite() && value >= -T::one() && value <= T::one() {
            Ok(RileScore(value))
        } else {
            Err(Error::ScoreOutOfRange(value.to_f64().unwrap_or(f64::NAN)))
        }
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn stance(self) -> StanceBin {
        StanceBin::of(self.0)
    }
}

/// `(R - L) / (R + L + O)`.
///
/// The numerator and denominator are exact integers before the single
/// division, so the result is the correctly rounded value of the rational
/// whenever the counts fit the scalar's mantissa.
pub fn rile_score<T: Scalar>(tally: &RileTally) -> Result<RileScore<T>> {
    let total = tally.total();
    if total == 0 {
        return Err(Error::EmptyTally);
    }
    let diff = tally.right as i128 - tally.left as i128;
    let num = T::from_i128(diff).ok_or(Error::EmptyTally)?;
    let den = T::from_u64(total).ok_or(Error::EmptyTally)?;
    RileScore::new(num / den)
}

/// Where a manifesto's statement labels come from.
#[derive(Debug, Clone, Copy)]
pub enum LabelSource<'a> {
    Gold,
    Predicted(&'a PredictionSet),
}

/// Tallies a manifesto's statements under `scale`.
pub fn manifesto_tally(m: &Manifesto, labels: LabelSource<'_>, scale: &RileScale) -> Result<RileTally> {
    let mut tally = RileTally::default();
    match labels {
        LabelSource::Gold => {
            for s in &m.statements {
                tally.add(scale.class_of(&s.code));
            }
        }
        LabelSource::Predicted(preds) => {
            let mut missing = Vec::new();
            for s in &m.statements {
                match preds.get(&s.id) {
                    Some(p) => tally.add(scale.class_of_label(&p.label)?),
                    None => missing.push(s.id.clone()),
                }
            }
            if !missing.is_empty() {
                return Err(Error::MissingPredictions(missing));
            }
        }
    }
    Ok(tally)
}

/// RILE of a manifesto under the standard scale.
pub fn manifesto_rile<T: Scalar>(m: &Manifesto, labels: LabelSource<'_>) -> Result<RileScore<T>> {
    manifesto_rile_with(m, labels, &RileScale::standard())
}

pub fn manifesto_rile_with<T: Scalar>(
    m: &Manifesto,
    labels: LabelSource<'_>,
    scale: &RileScale,
) -> Result<RileScore<T>> {
    rile_score(&manifesto_tally(m, labels, scale)?)
}

/// Five coarse stance classes over the RILE range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StanceBin {
    HardLeft,
    CentreLeft,
    Centrist,
    CentreRight,
    HardRight,
}

impl StanceBin {
    pub const ALL: [StanceBin; 5] = [
        StanceBin::HardLeft,
        StanceBin::CentreLeft,
        StanceBin::Centrist,
        StanceBin::CentreRight,
        StanceBin::HardRight,
    ];

    /// Interior bin boundaries. Each belongs to the bin above it.
    pub const BOUNDARIES: [f64; 4] = [-0.6, -0.2, 0.2, 0.6];

    /// Bin of an in-range value. Lower bounds are inclusive and upper bounds
    /// exclusive, except that `HardRight` also includes 1.
    fn of<T: Scalar>(value: T) -> StanceBin {
        let b = |i: usize| from_f64::<T>(Self::BOUNDARIES[i]);
        if value < b(0) {
            StanceBin::HardLeft
        } else if value < b(1) {
            StanceBin::CentreLeft
        } else if value < b(2) {
            StanceBin::Centrist
        } else if value < b(3) {
            StanceBin::CentreRight
        } else {
            StanceBin::HardRight
        }
    }

    /// 0 for `HardLeft` through 4 for `HardRight`.
    pub fn ordinal(self) -> usize {
        self as usize
    }

    /// Distance from `Centrist` in bins.
    pub fn extremity(self) -> usize {
        self.ordinal().abs_diff(2)
    }

    /// `(lower, upper)` bounds of the bin.
    pub fn interval(self) -> (f64, f64) {
        let i = self.ordinal();
        let lo = if i == 0 { -1.0 } else { Self::BOUNDARIES[i - 1] };
        let hi = if i == 4 { 1.0 } else { Self::BOUNDARIES[i] };
        (lo, hi)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StanceBin::HardLeft => "HardLeft",
            StanceBin::CentreLeft => "CentreLeft",
            StanceBin::Centrist => "Centrist",
            StanceBin::CentreRight => "CentreRight",
            StanceBin::HardRight => "HardRight",
        }
    }
}

impl fmt::Display for StanceBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StanceBin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "hardleft" | "l" => Ok(StanceBin::HardLeft),
            "centreleft" | "centerleft" | "cl" => Ok(StanceBin::CentreLeft),
            "centrist" | "c" => Ok(StanceBin::Centrist),
            "centreright" | "centerright" | "cr" => Ok(StanceBin::CentreRight),
            "hardright" | "r" => Ok(StanceBin::HardRight),
            _ => Err(Error::UnknownLabel(s.to_owned())),
        }
    }
}

/// Bins a raw score; values outside `[-1, 1]` are rejected.
pub fn stance_bin<T: Scalar>(value: T) -> Result<StanceBin> {
    RileScore::new(value).map(RileScore::stance)
}
