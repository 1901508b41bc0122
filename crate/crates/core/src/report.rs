//! Verification reports shared by every check.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Slack added to both ends of a ratio band.
pub const BAND_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// The band is a stated constant; violations fail the run.
    PassFail,
    /// The band is empirical; the report never fails the run.
    ReportOnly,
}

/// Where a band's constants come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandSource {
    /// Constants stated by the estimate being checked.
    Stated,
    /// Constants derived here from a stated estimate.
    Derived,
    /// No constant is known; the band records what was observed.
    Empirical,
    /// Exact identity; only a numerical tolerance applies.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: Map<String, Value>,
    pub inputs_digest: String,
    pub samples: u64,
    pub ratio_min: Option<f64>,
    pub ratio_max: Option<f64>,
    pub band_low: Option<f64>,
    pub band_high: Option<f64>,
    pub band_source: BandSource,
    pub mode: Mode,
    pub pass: bool,
    pub max_deviation: Option<f64>,
    pub bound: Option<f64>,
    pub seed: Option<u64>,
    pub tail_mass: Option<f64>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl VerificationReport {
    /// True unless this is a pass/fail report that failed.
    pub fn is_ok(&self) -> bool {
        self.pass || self.mode == Mode::ReportOnly
    }

    pub fn csv_header() -> &'static str {
        "check,params,ratio_min,ratio_max,band_low,band_high,pass"
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let params = Value::Object(self.params.clone()).to_string().replace('"', "\"\"");
        format!(
            "{},\"{}\",{},{},{},{},{}",
            self.check,
            params,
            opt(self.ratio_min),
            opt(self.ratio_max),
            opt(self.band_low),
            opt(self.band_high),
            self.pass
        )
    }
}

/// SHA-256 of the JSON serialization of `v`, hex encoded.
pub fn digest<T: Serialize + ?Sized>(v: &T) -> String {
    let bytes = serde_json::to_vec(v).expect("inputs serialize");
    hex::encode(Sha256::digest(bytes))
}

/// Accumulates observations and produces a [`VerificationReport`].
#[derive(Debug)]
pub struct ReportBuilder {
    check: String,
    params: Map<String, Value>,
    digest: String,
    samples: u64,
    ratio_min: f64,
    ratio_max: f64,
    band: Option<(f64, f64)>,
    band_source: BandSource,
    mode: Mode,
    max_dev: Option<f64>,
    bound: Option<f64>,
    seed: Option<u64>,
    tail_mass: Option<f64>,
    notes: Vec<String>,
    failed: bool,
}

impl ReportBuilder {
    pub fn new(check: &str) -> Self {
        Self {
            check: check.to_string(),
            params: Map::new(),
            digest: digest(&Value::Null),
            samples: 0,
            ratio_min: f64::INFINITY,
            ratio_max: f64::NEG_INFINITY,
            band: None,
            band_source: BandSource::Identity,
            mode: Mode::PassFail,
            max_dev: None,
            bound: None,
            seed: None,
            tail_mass: None,
            notes: Vec::new(),
            failed: false,
        }
    }

    pub fn param<V: Serialize>(mut self, key: &str, v: V) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(v).expect("parameter serializes"));
        self
    }

    pub fn inputs<T: Serialize + ?Sized>(mut self, v: &T) -> Self {
        self.digest = digest(v);
        self
    }

    pub fn band(mut self, low: f64, high: f64, source: BandSource) -> Self {
        self.band = Some((low, high));
        self.band_source = source;
        self
    }

    pub fn report_only(mut self) -> Self {
        self.mode = Mode::ReportOnly;
        self.band_source = BandSource::Empirical;
        self
    }

    pub fn bound(mut self, b: f64) -> Self {
        self.bound = Some(b);
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = Some(s);
        self
    }

    pub fn tail_mass(mut self, t: f64) -> Self {
        self.tail_mass = Some(t);
        self
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    /// Records one ratio sample.
    pub fn observe(&mut self, r: f64) {
        self.samples += 1;
        if r.is_nan() {
            self.failed = true;
            self.notes.push("NaN ratio observed".into());
            return;
        }
        self.ratio_min = self.ratio_min.min(r);
        self.ratio_max = self.ratio_max.max(r);
    }

    /// Records one deviation sample (compared against the bound).
    pub fn deviation(&mut self, d: f64) {
        self.samples += 1;
        let d = if d.is_nan() { f64::INFINITY } else { d };
        self.max_dev = Some(self.max_dev.map_or(d, |m: f64| m.max(d)));
    }

    /// Records a sample without a numeric outcome.
    pub fn count(&mut self) {
        self.samples += 1;
    }

    /// Marks the report failed with an explanation.
    pub fn fail(&mut self, why: impl Into<String>) {
        self.failed = true;
        self.notes.push(why.into());
    }

    pub fn finish(self) -> VerificationReport {
        let has_ratio = self.ratio_min.is_finite() || self.ratio_max.is_finite();
        let mut pass = !self.failed;
        if has_ratio {
            if let Some((lo, hi)) = self.band {
                pass &= self.ratio_min >= lo - BAND_SLACK && self.ratio_max <= hi + BAND_SLACK;
            }
        }
        if let (Some(d), Some(b)) = (self.max_dev, self.bound) {
            pass &= d <= b;
        }
        let mut notes = self.notes;
        if self.samples == 0 {
            notes.push("no nonzero samples; skipped".into());
        }
        let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
        VerificationReport {
            check: self.check,
            params: self.params,
            inputs_digest: self.digest,
            samples: self.samples,
            ratio_min: finite(self.ratio_min),
            ratio_max: finite(self.ratio_max),
            band_low: self.band.map(|b| b.0),
            band_high: self.band.and_then(|b| finite(b.1)),
            band_source: self.band_source,
            mode: self.mode,
            pass,
            max_deviation: self.max_dev.and_then(finite).or(self.max_dev.map(|_| f64::MAX)),
            bound: self.bound,
            seed: self.seed,
            tail_mass: self.tail_mass,
            notes,
            elapsed_ms: None,
        }
    }
}
