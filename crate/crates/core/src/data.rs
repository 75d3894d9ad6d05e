//! Portfolio CSV ingestion and design-matrix encoding.
//!
//! Categoricals become one indicator per non-reference level. Issue age and
//! duration are z-scored with the population standard deviation, and face
//! amount goes through `ln(x + shift)` followed by min-max scaling. All
//! transform parameters are learned on training rows only and frozen in an
//! [`EncodingPlan`], which round-trips through a `key=value` sidecar file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::frequentist::PredictorGroup;
use crate::model::Dataset;

/// The categorical columns of the portfolio schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    Region,
    SgInd,
    Gender,
    SmokerStatus,
    Lob,
    Plan,
}

impl Factor {
    pub const ALL: [Factor; 6] = [
        Factor::Region,
        Factor::SgInd,
        Factor::Gender,
        Factor::SmokerStatus,
        Factor::Lob,
        Factor::Plan,
    ];

    /// CSV header name.
    pub fn column(self) -> &'static str {
        match self {
            Factor::Region => "region",
            Factor::SgInd => "sg_ind",
            Factor::Gender => "gender",
            Factor::SmokerStatus => "smoker_status",
            Factor::Lob => "lob",
            Factor::Plan => "plan",
        }
    }

    /// Prefix of the indicator column names in the design.
    pub fn label(self) -> &'static str {
        match self {
            Factor::Region => "Region",
            Factor::SgInd => "SG_IND",
            Factor::Gender => "Gender",
            Factor::SmokerStatus => "SmokerStatus",
            Factor::Lob => "LOB",
            Factor::Plan => "Plan",
        }
    }

    pub fn levels(self) -> &'static [&'static str] {
        match self {
            Factor::Region => &[
                "Northeast_NewEngland",
                "Northeast_MidAtlantic",
                "Midwest",
                "South_Atlantic",
                "South_SouthCentral",
                "West_Mountain",
                "West_Pacific",
                "Foreign",
            ],
            Factor::SgInd => &["Brokerage", "Legacy", "UL_LTC", "NSG", "No Information", "SG"],
            Factor::Gender => &["Female", "Male"],
            Factor::SmokerStatus => &["Smoker", "Nonsmoker", "Unismoker"],
            Factor::Lob => &["ISL", "TRAD", "EM", "No Information"],
            Factor::Plan => &["UL_LTC", "Term", "UL_NSG", "UL_SG", "VUL", "Whole Life", "COLI"],
        }
    }

    /// Index of the default reference level.
    pub fn default_reference(self) -> usize {
        match self {
            Factor::SmokerStatus => 1,
            Factor::Lob => 2,
            Factor::Plan => 6,
            _ => 0,
        }
    }

    /// Level index for a CSV value. Matching ignores case, spaces and
    /// underscores; `Northest` is accepted for `Northeast`.
    pub fn parse_level(self, value: &str) -> Option<usize> {
        let key = normalize(value).replace("northest", "northeast");
        self.levels().iter().position(|l| normalize(l) == key)
    }
}

fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .flat_map(char::to_lowercase)
        .collect()
}

impl FromStr for Factor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Factor::ALL
            .into_iter()
            .find(|f| f.column() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown categorical column `{s}`")))
    }
}

/// The numeric predictors of the portfolio schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Numeric {
    IssueAge,
    FaceAmount,
    Duration,
}

impl Numeric {
    pub const ALL: [Numeric; 3] = [Numeric::IssueAge, Numeric::FaceAmount, Numeric::Duration];

    pub fn column(self) -> &'static str {
        match self {
            Numeric::IssueAge => "issue_age",
            Numeric::FaceAmount => "face_amount",
            Numeric::Duration => "duration",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Numeric::IssueAge => "IssueAge",
            Numeric::FaceAmount => "FaceAmount",
            Numeric::Duration => "Duration",
        }
    }
}

impl FromStr for Numeric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Numeric::ALL
            .into_iter()
            .find(|n| n.column() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown numeric column `{s}`")))
    }
}

pub const POLICY_HEADER: [&str; 10] = [
    "region",
    "sg_ind",
    "gender",
    "smoker_status",
    "lob",
    "plan",
    "issue_age",
    "face_amount",
    "duration",
    "death",
];

/// One policy row. Categoricals are stored as level indices in the order of
/// [`Factor::levels`], indexed by `Factor as usize`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRecord {
    pub levels: [usize; 6],
    pub issue_age: f64,
    pub face_amount: f64,
    pub duration: f64,
    pub death: u8,
}

impl PolicyRecord {
    pub fn level(&self, factor: Factor) -> usize {
        self.levels[factor as usize]
    }

    pub fn level_name(&self, factor: Factor) -> &'static str {
        factor.levels()[self.level(factor)]
    }

    pub fn numeric(&self, which: Numeric) -> f64 {
        match which {
            Numeric::IssueAge => self.issue_age,
            Numeric::FaceAmount => self.face_amount,
            Numeric::Duration => self.duration,
        }
    }
}

/// Whether a CSV header carries the portfolio columns.
pub fn is_policy_header<S: AsRef<str>>(headers: &[S]) -> bool {
    POLICY_HEADER
        .iter()
        .all(|h| headers.iter().any(|c| c.as_ref() == *h))
}

pub fn load_csv(path: &Path) -> Result<Vec<PolicyRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    read_records(file).map_err(|e| match e {
        Error::Invalid(message) => Error::Schema {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

/// Parses policy rows; `#` lines are comments. Rows are numbered from 1 after
/// the header.
pub fn read_records<R: Read>(reader: R) -> Result<Vec<PolicyRecord>> {
    let mut csv = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = csv.headers()?.iter().map(String::from).collect();
    let mut index = [0usize; 10];
    for (k, name) in POLICY_HEADER.iter().enumerate() {
        index[k] = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Invalid(format!("missing column `{name}`")))?;
    }
    let mut out = Vec::new();
    for (i, rec) in csv.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let get = |k: usize| rec.get(index[k]).unwrap_or("");
        let mut levels = [0usize; 6];
        for (k, factor) in Factor::ALL.into_iter().enumerate() {
            let value = get(k);
            levels[k] = factor.parse_level(value).ok_or_else(|| Error::Record {
                row,
                field: factor.column().into(),
                message: format!("unknown level `{value}`"),
            })?;
        }
        let number = |k: usize, lo: f64, hi: f64| -> Result<f64> {
            let value = get(k);
            let v: f64 = value.parse().map_err(|_| Error::Record {
                row,
                field: POLICY_HEADER[k].into(),
                message: format!("not a number: `{value}`"),
            })?;
            if !(v >= lo && v <= hi) {
                return Err(Error::Record {
                    row,
                    field: POLICY_HEADER[k].into(),
                    message: format!("{v} outside [{lo}, {hi}]"),
                });
            }
            Ok(v)
        };
        let issue_age = number(6, 0.0, 120.0)?;
        let face_amount = number(7, 0.0, f64::MAX)?;
        let duration = number(8, 0.0, f64::MAX)?;
        let death = match get(9) {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Record {
                    row,
                    field: "death".into(),
                    message: format!("expected 0 or 1, got `{other}`"),
                })
            }
        };
        out.push(PolicyRecord {
            levels,
            issue_age,
            face_amount,
            duration,
            death,
        });
    }
    Ok(out)
}

pub fn write_records<W: Write>(records: &[PolicyRecord], writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(POLICY_HEADER)?;
    for r in records {
        let mut fields: Vec<String> = Factor::ALL.iter().map(|&f| r.level_name(f).to_string()).collect();
        fields.extend([
            r.issue_age.to_string(),
            r.face_amount.to_string(),
            r.duration.to_string(),
            r.death.to_string(),
        ]);
        csv.write_record(&fields)?;
    }
    csv.flush()?;
    Ok(())
}

/// Which columns enter the design.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingOptions {
    pub factors: Vec<Factor>,
    pub numerics: Vec<Numeric>,
    /// Added to the face amount before the logarithm so that zero amounts
    /// stay finite.
    pub face_shift: f64,
}

impl Default for EncodingOptions {
    fn default() -> Self {
        EncodingOptions {
            factors: Factor::ALL.to_vec(),
            numerics: Numeric::ALL.to_vec(),
            face_shift: 1.0,
        }
    }
}

/// Frozen transform parameters learned on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingPlan {
    /// Included factors with their reference level index.
    pub factors: Vec<(Factor, usize)>,
    pub numerics: Vec<Numeric>,
    pub issue_age: (f64, f64),
    pub duration: (f64, f64),
    pub face_shift: f64,
    /// Minimum and maximum of `ln(face + shift)` on the training rows.
    pub log_face_range: (f64, f64),
}

/// Mean and population standard deviation.
fn mean_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// An encoded design. Rank is not checked here, so that small or
/// unbalanced prediction sets still encode; training goes through
/// [`Encoded::into_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub y: Vec<u8>,
    pub x: DMatrix<f64>,
    pub column_names: Vec<String>,
    /// Untransformed face amounts, in row order.
    pub face: Vec<f64>,
    /// One group per included factor or numeric predictor.
    pub groups: Vec<PredictorGroup>,
    /// Rows whose scaled face amount fell outside `[0, 1]` and was clamped.
    pub clamped: usize,
}

impl Encoded {
    /// Validated training dataset; fails with the colinear group when the
    /// design is rank deficient.
    pub fn into_dataset(self) -> Result<Dataset> {
        Dataset::new(self.y, self.x, self.column_names)
    }
}

impl EncodingPlan {
    pub fn fit(records: &[PolicyRecord], options: &EncodingOptions) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Invalid("cannot learn an encoding from zero rows".into()));
        }
        if !(options.face_shift >= 0.0 && options.face_shift.is_finite()) {
            return Err(Error::Domain(format!("face shift must be finite and nonnegative, got {}", options.face_shift)));
        }
        let mut factors: Vec<Factor> = options.factors.clone();
        factors.sort();
        factors.dedup();
        let mut numerics = options.numerics.clone();
        numerics.sort();
        numerics.dedup();
        let issue_age = mean_sd(records.iter().map(|r| r.issue_age));
        let duration = mean_sd(records.iter().map(|r| r.duration));
        let logs = records.iter().map(|r| (r.face_amount + options.face_shift).ln());
        let log_face_range = (
            logs.clone().fold(f64::INFINITY, f64::min),
            logs.fold(f64::NEG_INFINITY, f64::max),
        );
        let plan = EncodingPlan {
            factors: factors.into_iter().map(|f| (f, f.default_reference())).collect(),
            numerics,
            issue_age,
            duration,
            face_shift: options.face_shift,
            log_face_range,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        for &(f, r) in &self.factors {
            if r >= f.levels().len() {
                return Err(Error::Invalid(format!("reference level {r} out of range for {}", f.column())));
            }
        }
        for n in &self.numerics {
            let ok = match n {
                Numeric::IssueAge => self.issue_age.1 > 0.0 && self.issue_age.0.is_finite(),
                Numeric::Duration => self.duration.1 > 0.0 && self.duration.0.is_finite(),
                Numeric::FaceAmount => {
                    self.log_face_range.0.is_finite() && self.log_face_range.1 > self.log_face_range.0
                }
            };
            if !ok {
                return Err(Error::Domain(format!("{} has no spread in the training rows", n.column())));
            }
        }
        Ok(())
    }

    pub fn column_names(&self) -> Vec<String> {
        let mut names = vec!["intercept".to_string()];
        for &(f, reference) in &self.factors {
            for (k, level) in f.levels().iter().enumerate() {
                if k != reference {
                    names.push(format!("{}{}", f.label(), level.replace(' ', "")));
                }
            }
        }
        names.extend(self.numerics.iter().map(|n| n.label().to_string()));
        names
    }

    pub fn groups(&self) -> Vec<PredictorGroup> {
        let mut groups = Vec::new();
        let mut next = 1;
        for &(f, _) in &self.factors {
            let width = f.levels().len() - 1;
            groups.push(PredictorGroup {
                name: f.label().to_string(),
                columns: (next..next + width).collect(),
            });
            next += width;
        }
        for n in &self.numerics {
            groups.push(PredictorGroup {
                name: n.label().to_string(),
                columns: vec![next],
            });
            next += 1;
        }
        groups
    }

    /// Min-max scaled `ln(face + shift)`, before clamping.
    pub fn scale_face(&self, face: f64) -> f64 {
        let (lo, hi) = self.log_face_range;
        ((face + self.face_shift).ln() - lo) / (hi - lo)
    }

    pub fn encode(&self, records: &[PolicyRecord]) -> Result<Encoded> {
        self.validate()?;
        let names = self.column_names();
        let k = names.len();
        let mut x = DMatrix::zeros(records.len(), k);
        let mut clamped = 0;
        for (i, r) in records.iter().enumerate() {
            x[(i, 0)] = 1.0;
            let mut j = 1;
            for &(f, reference) in &self.factors {
                let level = r.level(f);
                for l in 0..f.levels().len() {
                    if l == reference {
                        continue;
                    }
                    if l == level {
                        x[(i, j)] = 1.0;
                    }
                    j += 1;
                }
            }
            for n in &self.numerics {
                x[(i, j)] = match n {
                    Numeric::IssueAge => (r.issue_age - self.issue_age.0) / self.issue_age.1,
                    Numeric::Duration => (r.duration - self.duration.0) / self.duration.1,
                    Numeric::FaceAmount => {
                        let s = self.scale_face(r.face_amount);
                        if !(0.0..=1.0).contains(&s) {
                            clamped += 1;
                        }
                        s.clamp(0.0, 1.0)
                    }
                };
                j += 1;
            }
        }
        Ok(Encoded {
            y: records.iter().map(|r| r.death).collect(),
            x,
            column_names: names,
            face: records.iter().map(|r| r.face_amount).collect(),
            groups: self.groups(),
            clamped,
        })
    }

    /// `key=value` lines, one per parameter.
    pub fn to_sidecar(&self) -> String {
        let mut s = String::new();
        let join = |v: Vec<&str>| v.join(",");
        let _ = writeln!(s, "factors={}", join(self.factors.iter().map(|(f, _)| f.column()).collect()));
        for &(f, r) in &self.factors {
            let _ = writeln!(s, "reference.{}={}", f.column(), f.levels()[r]);
        }
        let _ = writeln!(s, "numerics={}", join(self.numerics.iter().map(|n| n.column()).collect()));
        let _ = writeln!(s, "issue_age.mean={}", self.issue_age.0);
        let _ = writeln!(s, "issue_age.sd={}", self.issue_age.1);
        let _ = writeln!(s, "duration.mean={}", self.duration.0);
        let _ = writeln!(s, "duration.sd={}", self.duration.1);
        let _ = writeln!(s, "face_amount.shift={}", self.face_shift);
        let _ = writeln!(s, "face_amount.log_min={}", self.log_face_range.0);
        let _ = writeln!(s, "face_amount.log_max={}", self.log_face_range.1);
        s
    }

    /// Parses [`EncodingPlan::to_sidecar`] output; blank and `#` lines are ignored.
    pub fn from_sidecar(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("plan line {}: expected key=value", i + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| -> Result<&str> {
            map.get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::Invalid(format!("plan is missing `{k}`")))
        };
        let num = |k: &str| -> Result<f64> {
            get(k)?
                .parse()
                .map_err(|_| Error::Invalid(format!("plan value `{k}` is not a number")))
        };
        let list = |k: &str| -> Result<Vec<String>> {
            Ok(get(k)?.split(',').filter(|s| !s.is_empty()).map(String::from).collect())
        };
        let mut factors = Vec::new();
        for name in list("factors")? {
            let f: Factor = name.parse()?;
            let level = get(&format!("reference.{name}"))?;
            let r = f
                .parse_level(level)
                .ok_or_else(|| Error::Invalid(format!("unknown reference level `{level}` for {name}")))?;
            factors.push((f, r));
        }
        let numerics = list("numerics")?
            .iter()
            .map(|n| n.parse())
            .collect::<Result<Vec<Numeric>>>()?;
        let plan = EncodingPlan {
            factors,
            numerics,
            issue_age: (num("issue_age.mean")?, num("issue_age.sd")?),
            duration: (num("duration.mean")?, num("duration.sd")?),
            face_shift: num("face_amount.shift")?,
            log_face_range: (num("face_amount.log_min")?, num("face_amount.log_max")?),
        };
        plan.validate()?;
        Ok(plan)
    }
}

/// Numeric table with a `y` column followed by predictor columns; an
/// intercept is prepended. An optional `face_amount` column is returned
/// separately instead of entering the design.
pub fn read_numeric_csv<R: Read>(reader: R) -> Result<(Dataset, Option<Vec<f64>>)> {
    let mut csv = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = csv.headers()?.iter().map(String::from).collect();
    let y_col = headers
        .iter()
        .position(|h| h == "y")
        .ok_or_else(|| Error::Invalid("missing column `y`".into()))?;
    let face_col = headers.iter().position(|h| h == "face_amount");
    let predictors: Vec<usize> = (0..headers.len()).filter(|&j| j != y_col && Some(j) != face_col).collect();
    let mut y = Vec::new();
    let mut rows = Vec::new();
    let mut face = Vec::new();
    for (i, rec) in csv.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let value = |j: usize| -> Result<f64> {
            let raw = rec.get(j).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Record {
                    row,
                    field: headers[j].clone(),
                    message: format!("not a finite number: `{raw}`"),
                })
        };
        y.push(match rec.get(y_col).unwrap_or("") {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Record {
                    row,
                    field: "y".into(),
                    message: format!("expected 0 or 1, got `{other}`"),
                })
            }
        });
        rows.push(predictors.iter().map(|&j| value(j)).collect::<Result<Vec<_>>>()?);
        if let Some(j) = face_col {
            face.push(value(j)?);
        }
    }
    let names: Vec<&str> = predictors.iter().map(|&j| headers[j].as_str()).collect();
    let data = Dataset::from_predictors(y, &rows, &names)?;
    Ok((data, face_col.map(|_| face)))
}

/// Writes `y` and the non-intercept design columns.
pub fn write_numeric_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let mut header = vec!["y".to_string()];
    header.extend(data.column_names()[1..].iter().cloned());
    csv.write_record(&header)?;
    for i in 0..data.n() {
        let mut fields = vec![data.y()[i].to_string()];
        fields.extend((1..data.x().ncols()).map(|j| data.x()[(i, j)].to_string()));
        csv.write_record(&fields)?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const HEADER: &str = "region,sg_ind,gender,smoker_status,lob,plan,issue_age,face_amount,duration,death\n";

    fn record(levels: [usize; 6], issue_age: f64, face_amount: f64, duration: f64, death: u8) -> PolicyRecord {
        PolicyRecord {
            levels,
            issue_age,
            face_amount,
            duration,
            death,
        }
    }

    #[test]
    fn well_formed_rows_parse() {
        let text = format!(
            "{HEADER}Midwest,NSG,Male,Nonsmoker,TRAD,Term,45,250000,3,0\n\
             # a comment line\n\
             Northest_NewEngland,No Information,Female,Smoker,No Information,Whole Life,60,0,10,1\n\
             foreign,sg,male,unismoker,em,coli,30,1e6,0.5,0\n"
        );
        let rows = read_records(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].level_name(Factor::Region), "Midwest");
        assert_eq!(rows[1].level_name(Factor::Region), "Northeast_NewEngland");
        assert_eq!(rows[1].level_name(Factor::Plan), "Whole Life");
        assert_eq!(rows[2].level_name(Factor::Plan), "COLI");
        assert_eq!(rows[1].death, 1);
        assert!(read_records(HEADER.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn bad_rows_name_the_row_and_field() {
        let text = format!("{HEADER}Midwest,NSG,Male,Nonsmoker,TRAD,Term,45,1,3,0\nMidwest,NSG,Male,X,TRAD,Term,45,1,3,0\n");
        match read_records(text.as_bytes()) {
            Err(Error::Record { row, field, .. }) => assert_eq!((row, field.as_str()), (2, "smoker_status")),
            other => panic!("{other:?}"),
        }
        let text = format!("{HEADER}Midwest,NSG,Male,Nonsmoker,TRAD,Term,abc,1,3,0\n");
        assert!(matches!(read_records(text.as_bytes()), Err(Error::Record { row: 1, .. })));
        let text = format!("{HEADER}Midwest,NSG,Male,Nonsmoker,TRAD,Term,45,-1,3,0\n");
        assert!(read_records(text.as_bytes()).is_err());
        let text = format!("{HEADER}Midwest,NSG,Male,Nonsmoker,TRAD,Term,45,1,3,2\n");
        assert!(read_records(text.as_bytes()).is_err());
        assert!(matches!(
            read_records("region,gender\nMidwest,Male\n".as_bytes()),
            Err(Error::Invalid(m)) if m.contains("sg_ind")
        ));
    }

    #[test]
    fn records_round_trip_through_csv() {
        let rows = vec![record([2, 3, 1, 1, 1, 1], 45.0, 250000.0, 3.0, 0), record([7, 5, 0, 2, 2, 6], 30.5, 0.0, 1.25, 1)];
        let mut buf = Vec::new();
        write_records(&rows, &mut buf).unwrap();
        assert_eq!(read_records(buf.as_slice()).unwrap(), rows);
    }

    fn random_records(n: usize, seed: u64) -> Vec<PolicyRecord> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let mut levels = [0; 6];
                for (k, f) in Factor::ALL.iter().enumerate() {
                    levels[k] = rng.random_range(0..f.levels().len());
                }
                record(
                    levels,
                    rng.random_range(18.0..80.0),
                    rng.random_range(0.0..2e6),
                    rng.random_range(0.0..30.0),
                    u8::from(rng.random::<f64>() < 0.05),
                )
            })
            .collect()
    }

    #[test]
    fn full_training_design_has_full_rank() {
        let rows = random_records(2000, 1);
        let plan = EncodingPlan::fit(&rows, &EncodingOptions::default()).unwrap();
        let data = plan.encode(&rows).unwrap().into_dataset().unwrap();
        assert_eq!(data.x().ncols(), 1 + 7 + 5 + 1 + 2 + 3 + 6 + 3);
        // identical indicator columns are reported as a colinear group
        let mut twin = rows.clone();
        for r in &mut twin {
            r.levels[Factor::Lob as usize] = if r.level(Factor::SgInd) == 4 { 3 } else { r.level(Factor::Lob) % 3 };
            if r.level(Factor::Lob) == 3 {
                r.levels[Factor::SgInd as usize] = 4;
            }
        }
        match plan.encode(&twin).unwrap().into_dataset() {
            Err(Error::RankDeficient { columns }) => {
                assert!(columns.contains(&"SG_INDNoInformation".to_string()));
                assert!(columns.contains(&"LOBNoInformation".to_string()));
            }
            other => panic!("{other:?}"),
        }
    }

    fn numeric_only(records: &[PolicyRecord]) -> EncodingPlan {
        EncodingPlan::fit(
            records,
            &EncodingOptions {
                factors: vec![],
                ..EncodingOptions::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn numeric_transforms() {
        let e = std::f64::consts::E;
        let rows = vec![
            record([0; 6], 20.0, e - 1.0, 1.0, 0),
            record([0; 6], 40.0, e * e - 1.0, 2.0, 1),
            record([0; 6], 60.0, e * e * e - 1.0, 6.0, 0),
        ];
        let plan = numeric_only(&rows);
        assert_relative_eq!(plan.issue_age.0, 40.0);
        assert_relative_eq!(plan.issue_age.1, (800.0f64 / 3.0).sqrt());
        let enc = plan.encode(&rows).unwrap();
        let x = &enc.x;
        let sd = plan.issue_age.1;
        for (i, age) in [20.0, 40.0, 60.0].iter().enumerate() {
            assert_relative_eq!(x[(i, 1)], (age - 40.0) / sd, epsilon = 1e-12);
        }
        for (i, s) in [0.0, 0.5, 1.0].iter().enumerate() {
            assert_relative_eq!(x[(i, 2)], *s, epsilon = 1e-12);
        }
        assert_eq!(enc.face, vec![e - 1.0, e * e - 1.0, e * e * e - 1.0]);
        assert_eq!(enc.column_names, ["intercept", "IssueAge", "FaceAmount", "Duration"]);
    }

    #[test]
    fn test_rows_use_training_parameters_and_clamp() {
        let train = vec![
            record([0; 6], 20.0, 10.0, 1.0, 0),
            record([0; 6], 40.0, 100.0, 2.0, 1),
            record([0; 6], 60.0, 1000.0, 6.0, 0),
        ];
        let plan = numeric_only(&train);
        let before = plan.clone();
        let test = vec![record([0; 6], 90.0, 5.0, 3.0, 0), record([0; 6], 50.0, 1e6, 3.0, 1), record([0; 6], 35.0, 50.0, 3.0, 0)];
        let enc = plan.encode(&test).unwrap();
        assert_eq!(plan, before);
        assert_eq!(enc.clamped, 2);
        assert_eq!(enc.x[(0, 2)], 0.0);
        assert_eq!(enc.x[(1, 2)], 1.0);
        assert_relative_eq!(enc.x[(0, 1)], (90.0 - 40.0) / plan.issue_age.1);
    }

    #[test]
    fn reference_levels_are_all_zero_and_groups_cover_columns() {
        let rows = random_records(400, 8);
        let options = EncodingOptions {
            factors: vec![Factor::Plan, Factor::SmokerStatus, Factor::Lob],
            ..EncodingOptions::default()
        };
        let plan = EncodingPlan::fit(&rows, &options).unwrap();
        let names = plan.column_names();
        assert!(!names.contains(&"PlanCOLI".to_string()));
        assert!(!names.contains(&"LOBEM".to_string()));
        assert!(!names.contains(&"SmokerStatusNonsmoker".to_string()));
        assert!(names.contains(&"PlanWholeLife".to_string()));
        let enc = plan.encode(&rows).unwrap();
        let coli = rows.iter().position(|r| r.level_name(Factor::Plan) == "COLI").unwrap();
        let plan_group = enc.groups.iter().find(|g| g.name == "Plan").unwrap();
        assert_eq!(plan_group.columns.len(), 6);
        assert!(plan_group.columns.iter().all(|&c| enc.x[(coli, c)] == 0.0));
        let covered: usize = enc.groups.iter().map(|g| g.columns.len()).sum();
        assert_eq!(covered + 1, enc.x.ncols());
        assert!(enc.clone().into_dataset().is_ok());
        // same plan and rows, same matrix
        assert_eq!(plan.encode(&rows).unwrap(), enc);
    }

    #[test]
    fn sidecar_round_trip() {
        let rows = vec![record([0, 0, 0, 0, 0, 0], 20.0, 0.0, 1.0, 0), record([1, 1, 1, 1, 1, 1], 41.3, 12345.6, 2.7, 1)];
        let plan = EncodingPlan::fit(&rows, &EncodingOptions::default()).unwrap();
        let text = plan.to_sidecar();
        assert!(text.contains("reference.plan=COLI"));
        assert!(text.contains("reference.lob=EM"));
        assert_eq!(EncodingPlan::from_sidecar(&text).unwrap(), plan);
        assert!(EncodingPlan::from_sidecar("factors=plan\n").is_err());
    }

    #[test]
    fn constant_numeric_is_rejected() {
        let rows = vec![record([0; 6], 30.0, 10.0, 1.0, 0), record([0; 6], 30.0, 20.0, 2.0, 1)];
        assert!(EncodingPlan::fit(&rows, &EncodingOptions::default()).is_err());
    }

    #[test]
    fn numeric_csv_round_trip() {
        let text = "y,x1,x2\n0,1,0.5\n1,2,-1.25\n0,2,3\n";
        let (d, face) = read_numeric_csv(text.as_bytes()).unwrap();
        assert!(face.is_none());
        assert_eq!(d.column_names(), ["intercept", "x1", "x2"]);
        let mut buf = Vec::new();
        write_numeric_csv(&d, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
        let (_, face) = read_numeric_csv("y,x,face_amount\n0,1,10\n1,2,20\n0,4,5\n".as_bytes()).unwrap();
        assert_eq!(face, Some(vec![10.0, 20.0, 5.0]));
        assert!(matches!(
            read_numeric_csv("y,x\n0,1\n3,2\n".as_bytes()),
            Err(Error::Record { row: 2, .. })
        ));
    }
}
