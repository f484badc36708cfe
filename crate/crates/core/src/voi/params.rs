//! Scenario, sensor and curve-shape parameters.

use serde::{Deserialize, Serialize};

use super::VoiError;

/// Propagation environment of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Urban,
    Highway,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Urban => "urban",
            ScenarioKind::Highway => "highway",
        }
    }

    /// Speed limit used by the built-in scenarios (m/s).
    pub fn default_speed_limit(self) -> f64 {
        match self {
            ScenarioKind::Urban => 12.0,
            ScenarioKind::Highway => 36.0,
        }
    }

    pub fn default_los(self) -> LosModel {
        match self {
            ScenarioKind::Urban => LosModel::UrbanV2v,
            ScenarioKind::Highway => LosModel::HighwayV2v,
        }
    }
}

/// Line-of-sight probability between a sensor and an observed object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosModel {
    /// 3GPP TR 37.885 V2V urban: `min(1, 1.05 exp(-0.0114 d))`.
    UrbanV2v,
    /// 3GPP TR 37.885 V2V highway: quadratic up to 475 m, linear decay beyond.
    HighwayV2v,
    /// Every observation is in line of sight.
    Unobstructed,
}

/// Distance at which the highway model switches from the quadratic to the
/// linear branch (m).
pub const HIGHWAY_LOS_BREAKPOINT: f64 = 475.0;

impl LosModel {
    pub fn probability(self, d: f64) -> f64 {
        match self {
            LosModel::UrbanV2v => (1.05 * (-0.0114 * d).exp()).min(1.0),
            LosModel::HighwayV2v => {
                if d <= HIGHWAY_LOS_BREAKPOINT {
                    (2.1013e-6 * d * d - 0.002 * d + 1.0193).min(1.0)
                } else {
                    (0.54 - 0.001 * (d - HIGHWAY_LOS_BREAKPOINT)).max(0.0)
                }
            }
            LosModel::Unobstructed => 1.0,
        }
    }
}

/// `d_s = 2 v_max`.
pub fn safety_distance(v_max: f64) -> Result<f64, VoiError> {
    if !(v_max > 0.0 && v_max.is_finite()) {
        return Err(VoiError::domain("speed limit", v_max));
    }
    Ok(2.0 * v_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioSpec", into = "ScenarioSpec")]
pub struct Scenario {
    kind: ScenarioKind,
    v_max: f64,
    safety_distance: f64,
    los: LosModel,
}

impl Scenario {
    pub fn from_speed_limit(kind: ScenarioKind, v_max: f64) -> Result<Self, VoiError> {
        Ok(Self {
            kind,
            v_max,
            safety_distance: safety_distance(v_max)?,
            los: kind.default_los(),
        })
    }

    /// Urban scenario with a 12 m/s speed limit (`d_s = 24 m`).
    pub fn urban() -> Self {
        Self::from_speed_limit(
            ScenarioKind::Urban,
            ScenarioKind::Urban.default_speed_limit(),
        )
        .expect("positive speed limit")
    }

    /// Highway scenario with a 36 m/s speed limit (`d_s = 72 m`).
    pub fn highway() -> Self {
        Self::from_speed_limit(
            ScenarioKind::Highway,
            ScenarioKind::Highway.default_speed_limit(),
        )
        .expect("positive speed limit")
    }

    pub fn of_kind(kind: ScenarioKind) -> Self {
        match kind {
            ScenarioKind::Urban => Self::urban(),
            ScenarioKind::Highway => Self::highway(),
        }
    }

    /// Overrides the safety distance derived from the speed limit.
    pub fn with_safety_distance(mut self, d_s: f64) -> Result<Self, VoiError> {
        if !(d_s > 0.0 && d_s.is_finite()) {
            return Err(VoiError::domain("safety distance", d_s));
        }
        self.safety_distance = d_s;
        Ok(self)
    }

    pub fn with_los(mut self, los: LosModel) -> Self {
        self.los = los;
        self
    }

    pub fn kind(&self) -> ScenarioKind {
        self.kind
    }

    pub fn speed_limit(&self) -> f64 {
        self.v_max
    }

    pub fn safety_distance(&self) -> f64 {
        self.safety_distance
    }

    pub fn los(&self) -> LosModel {
        self.los
    }
}

/// Serialized form of a [`Scenario`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safety_distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub los: Option<LosModel>,
}

impl TryFrom<ScenarioSpec> for Scenario {
    type Error = VoiError;

    fn try_from(spec: ScenarioSpec) -> Result<Self, Self::Error> {
        let v_max = spec.v_max.unwrap_or(spec.kind.default_speed_limit());
        let mut scenario = Scenario::from_speed_limit(spec.kind, v_max)?;
        if let Some(d_s) = spec.safety_distance {
            scenario = scenario.with_safety_distance(d_s)?;
        }
        if let Some(los) = spec.los {
            scenario = scenario.with_los(los);
        }
        Ok(scenario)
    }
}

impl From<Scenario> for ScenarioSpec {
    fn from(s: Scenario) -> Self {
        Self {
            kind: s.kind,
            v_max: Some(s.v_max),
            safety_distance: Some(s.safety_distance),
            los: Some(s.los),
        }
    }
}

/// Generalized logistic curve `A + (K - A) / (C + Q exp(-B (d - d_s)))^(1/nu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LogisticSpec", into = "LogisticSpec")]
pub struct LogisticParams {
    a: f64,
    k: f64,
    c: f64,
    q: f64,
    b: f64,
    nu: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            k: 0.0,
            c: 1.0,
            q: 1.0,
            b: 0.03,
            nu: 0.2,
        }
    }
}

impl LogisticParams {
    pub fn new(a: f64, k: f64, c: f64, q: f64, b: f64, nu: f64) -> Result<Self, VoiError> {
        for (name, v) in [("A", a), ("K", k)] {
            if !v.is_finite() {
                return Err(VoiError::domain(name, v));
            }
        }
        for (name, v) in [("C", c), ("Q", q), ("B", b), ("nu", nu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(VoiError::domain(name, v));
            }
        }
        Ok(Self { a, k, c, q, b, nu })
    }

    pub fn eval(&self, d: f64, d_s: f64) -> f64 {
        let base = self.c + self.q * (-self.b * (d - d_s)).exp();
        self.a + (self.k - self.a) / base.powf(1.0 / self.nu)
    }

    /// `(A, K, C, Q, B, nu)`.
    pub fn as_tuple(&self) -> (f64, f64, f64, f64, f64, f64) {
        (self.a, self.k, self.c, self.q, self.b, self.nu)
    }
}

/// Serialized form of [`LogisticParams`]; omitted fields take the defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogisticSpec {
    #[serde(rename = "A", default)]
    pub a: Option<f64>,
    #[serde(rename = "K", default)]
    pub k: Option<f64>,
    #[serde(rename = "C", default)]
    pub c: Option<f64>,
    #[serde(rename = "Q", default)]
    pub q: Option<f64>,
    #[serde(rename = "B", default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub nu: Option<f64>,
}

impl TryFrom<LogisticSpec> for LogisticParams {
    type Error = VoiError;

    fn try_from(s: LogisticSpec) -> Result<Self, Self::Error> {
        let d = LogisticParams::default();
        LogisticParams::new(
            s.a.unwrap_or(d.a),
            s.k.unwrap_or(d.k),
            s.c.unwrap_or(d.c),
            s.q.unwrap_or(d.q),
            s.b.unwrap_or(d.b),
            s.nu.unwrap_or(d.nu),
        )
    }
}

impl From<LogisticParams> for LogisticSpec {
    fn from(p: LogisticParams) -> Self {
        Self {
            a: Some(p.a),
            k: Some(p.k),
            c: Some(p.c),
            q: Some(p.q),
            b: Some(p.b),
            nu: Some(p.nu),
        }
    }
}

/// How fast an observation goes stale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalClass {
    /// e.g. road works; `P_td = 0`.
    Static,
    /// e.g. a temporary event; `P_td = 1`.
    Variable,
    /// e.g. a pedestrian crossing; `P_td = 10`.
    Dynamic,
    Custom {
        p_td: f64,
    },
}

impl TemporalClass {
    pub fn custom(p_td: f64) -> Result<Self, VoiError> {
        if !(p_td >= 0.0 && p_td.is_finite()) {
            return Err(VoiError::domain("temporal decay", p_td));
        }
        Ok(TemporalClass::Custom { p_td })
    }

    /// Temporal decay parameter (1/s).
    pub fn p_td(self) -> f64 {
        match self {
            TemporalClass::Static => 0.0,
            TemporalClass::Variable => 1.0,
            TemporalClass::Dynamic => 10.0,
            TemporalClass::Custom { p_td } => p_td,
        }
    }

    pub fn name(self) -> String {
        match self {
            TemporalClass::Static => "static".into(),
            TemporalClass::Variable => "variable".into(),
            TemporalClass::Dynamic => "dynamic".into(),
            TemporalClass::Custom { p_td } => format!("ptd{p_td}"),
        }
    }

    /// Maps a decay rate onto the named class when it matches one.
    pub fn from_p_td(p_td: f64) -> Result<Self, VoiError> {
        Ok(if p_td == 0.0 {
            TemporalClass::Static
        } else if p_td == 1.0 {
            TemporalClass::Variable
        } else if p_td == 10.0 {
            TemporalClass::Dynamic
        } else {
            TemporalClass::custom(p_td)?
        })
    }
}

/// `f_d = (r_h / 2) / tan(f_w / 2)` with the field of view in degrees.
pub fn focal_distance(r_h: f64, f_w_deg: f64) -> Result<f64, VoiError> {
    if !(r_h > 0.0 && r_h.is_finite()) {
        return Err(VoiError::domain("horizontal resolution", r_h));
    }
    if !(f_w_deg > 0.0 && f_w_deg < 180.0) {
        return Err(VoiError::domain("field of view", f_w_deg));
    }
    Ok((r_h / 2.0) / (f_w_deg / 180.0 * std::f64::consts::FRAC_PI_2).tan())
}

/// A camera used as the information source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SensorSpec", into = "SensorSpec")]
pub struct SensorModel {
    height: f64,
    field_of_view: f64,
    resolution: f64,
    focal_distance: f64,
}

pub const DEFAULT_SENSOR_HEIGHT: f64 = 1.2;
pub const DEFAULT_FIELD_OF_VIEW: f64 = 70.0;

impl SensorModel {
    /// `height` in m, `field_of_view` in degrees, `resolution` in horizontal pixels.
    pub fn new(height: f64, field_of_view: f64, resolution: f64) -> Result<Self, VoiError> {
        if !(height > 0.0 && height.is_finite()) {
            return Err(VoiError::domain("sensor height", height));
        }
        Ok(Self {
            height,
            field_of_view,
            resolution,
            focal_distance: focal_distance(resolution, field_of_view)?,
        })
    }

    /// Roof camera (1.2 m, 70 deg) with the given horizontal resolution.
    pub fn camera(resolution: f64) -> Result<Self, VoiError> {
        Self::new(DEFAULT_SENSOR_HEIGHT, DEFAULT_FIELD_OF_VIEW, resolution)
    }

    /// 640 px.
    pub fn low() -> Self {
        Self::camera(640.0).expect("valid preset")
    }

    /// 1280 px.
    pub fn medium() -> Self {
        Self::camera(1280.0).expect("valid preset")
    }

    /// 4096 px.
    pub fn high() -> Self {
        Self::camera(4096.0).expect("valid preset")
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn field_of_view(&self) -> f64 {
        self.field_of_view
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn focal_distance(&self) -> f64 {
        self.focal_distance
    }

    /// Observation distance at which the processed quality score reaches 0.
    pub fn range(&self) -> f64 {
        self.height * self.focal_distance
    }
}

/// Serialized form of a [`SensorModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec {
    #[serde(default = "default_height")]
    pub height: f64,
    #[serde(default = "default_fov")]
    pub field_of_view: f64,
    pub resolution: f64,
}

fn default_height() -> f64 {
    DEFAULT_SENSOR_HEIGHT
}

fn default_fov() -> f64 {
    DEFAULT_FIELD_OF_VIEW
}

impl TryFrom<SensorSpec> for SensorModel {
    type Error = VoiError;

    fn try_from(s: SensorSpec) -> Result<Self, Self::Error> {
        SensorModel::new(s.height, s.field_of_view, s.resolution)
    }
}

impl From<SensorModel> for SensorSpec {
    fn from(s: SensorModel) -> Self {
        Self {
            height: s.height,
            field_of_view: s.field_of_view,
            resolution: s.resolution,
        }
    }
}
