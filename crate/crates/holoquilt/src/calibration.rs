//! Display calibration: the per-panel JSON shipped with slanted-lenticular
//! lightfield displays, and its reduction to the handful of numbers the
//! subpixel mapping actually consumes.

use crate::error::{Error, Result};
use crate::quilt::QuiltLayout;

/// Factory calibration of one display panel.
///
/// Numeric fields appear in the JSON as `{"value": x}` objects (bare numbers
/// are also accepted); `configVersion` and `serial` are plain strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub config_version: String,
    pub serial: String,
    /// Lenticular pitch in lenses per inch.
    pub pitch: f64,
    /// Lens slant: vertical pixels crossed per horizontal pixel (signed).
    pub slope: f64,
    /// Horizontal phase offset of the lens array, in lens widths.
    pub center: f64,
    pub view_cone: f64,
    /// 1.0 when the view order must be reversed for this panel.
    pub inv_view: f64,
    pub vertical_angle: f64,
    pub dpi: f64,
    pub screen_w: f64,
    pub screen_h: f64,
    pub flip_image_x: f64,
    pub flip_image_y: f64,
    pub flip_subp: f64,
}

impl Calibration {
    pub fn parse(json_text: &str) -> Result<Calibration> {
        let value: serde_json::Value =
            serde_json::from_str(json_text).map_err(|e| Error::MalformedJson(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::MalformedJson("top level is not an object".into()))?;

        let cal = Calibration {
            config_version: string_field(obj, "configVersion")?,
            serial: string_field(obj, "serial")?,
            pitch: numeric_field(obj, "pitch")?,
            slope: numeric_field(obj, "slope")?,
            center: numeric_field(obj, "center")?,
            view_cone: numeric_field(obj, "viewCone")?,
            inv_view: numeric_field(obj, "invView")?,
            vertical_angle: numeric_field(obj, "verticalAngle")?,
            dpi: numeric_field(obj, "DPI")?,
            screen_w: numeric_field(obj, "screenW")?,
            screen_h: numeric_field(obj, "screenH")?,
            flip_image_x: numeric_field(obj, "flipImageX")?,
            flip_image_y: numeric_field(obj, "flipImageY")?,
            flip_subp: numeric_field(obj, "flipSubp")?,
        };
        cal.validate()?;
        Ok(cal)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str| Err(Error::InvariantViolation(name.to_string()));
        if !(self.screen_w > 0.0) {
            return bad("screenW");
        }
        if !(self.screen_h > 0.0) {
            return bad("screenH");
        }
        if !(self.dpi > 0.0) {
            return bad("DPI");
        }
        if !(self.pitch > 0.0) {
            return bad("pitch");
        }
        if self.slope == 0.0 {
            return bad("slope");
        }
        for (name, v) in [
            ("flipImageX", self.flip_image_x),
            ("flipImageY", self.flip_image_y),
            ("flipSubp", self.flip_subp),
        ] {
            if v != 0.0 && v != 1.0 {
                return Err(Error::InvariantViolation(name.to_string()));
            }
        }
        Ok(())
    }

    /// Panel size in pixels.
    pub fn native_dims(&self) -> (u32, u32) {
        (self.screen_w.round() as u32, self.screen_h.round() as u32)
    }

    /// Serializes back to the display JSON schema (numbers wrapped as
    /// `{"value": x}`, same key order the panels ship with).
    pub fn to_json(&self) -> String {
        fn num(v: f64) -> String {
            serde_json::Number::from_f64(v)
                .expect("calibration values must be finite")
                .to_string()
        }
        fn s(v: &str) -> String {
            serde_json::to_string(v).expect("string serialization cannot fail")
        }
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"configVersion\": {},\n", s(&self.config_version)));
        out.push_str(&format!("  \"serial\": {},\n", s(&self.serial)));
        for (key, v) in [
            ("pitch", self.pitch),
            ("slope", self.slope),
            ("center", self.center),
            ("viewCone", self.view_cone),
            ("invView", self.inv_view),
            ("verticalAngle", self.vertical_angle),
            ("DPI", self.dpi),
            ("screenW", self.screen_w),
            ("screenH", self.screen_h),
            ("flipImageX", self.flip_image_x),
            ("flipImageY", self.flip_image_y),
            ("flipSubp", self.flip_subp),
        ] {
            out.push_str(&format!("  \"{key}\": {{\"value\": {}}},\n", num(v)));
        }
        out.pop();
        out.pop();
        out.push_str("\n}\n");
        out
    }
}

fn field<'a>(
    obj: &'a serde_json::Map<String, serde_json::Value>,
    key: &str,
) -> Result<&'a serde_json::Value> {
    obj.get(key)
        .ok_or_else(|| Error::MissingField(key.to_string()))
}

/// Unwraps `{"value": x}` or passes a bare value through.
fn unwrap_value<'a>(v: &'a serde_json::Value) -> &'a serde_json::Value {
    match v {
        serde_json::Value::Object(map) => map.get("value").unwrap_or(v),
        _ => v,
    }
}

fn numeric_field(
    obj: &serde_json::Map<String, serde_json::Value>,
    key: &str,
) -> Result<f64> {
    unwrap_value(field(obj, key)?)
        .as_f64()
        .ok_or_else(|| Error::MalformedJson(format!("field '{key}' is not a number")))
}

fn string_field(
    obj: &serde_json::Map<String, serde_json::Value>,
    key: &str,
) -> Result<String> {
    unwrap_value(field(obj, key)?)
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::MalformedJson(format!("field '{key}' is not a string")))
}

/// Everything [`crate::lenmap::view_index`] needs, precomputed from a
/// calibration and a quilt layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingParams {
    /// Lenticular pitch projected onto the panel, in subpixels per lens.
    pub pitch_px: f64,
    /// Tangent of the lens slant in pixel units (signed).
    pub tan_alpha: f64,
    /// Horizontal phase offset in lens widths.
    pub offset: f64,
    pub total_views: u32,
    pub flip_x: bool,
    pub flip_y: bool,
    pub flip_subpixel: bool,
    pub inverted_views: bool,
}

/// Reduces a calibration plus quilt layout to mapping parameters.
///
/// The slanted lens array is described in the calibration by lenses-per-inch
/// (`pitch`), a slant `slope`, and a phase `center`. On the panel this
/// becomes a subpixel period `pitch * screen_w / dpi * cos(atan(1/|slope|))`
/// — the lens width measured along a pixel row — and a per-row shear
/// `tan_alpha = screen_h / (screen_w * slope)`, negated when the panel
/// mirrors horizontally.
pub fn derive_mapping_params(cal: &Calibration, layout: &QuiltLayout) -> MappingParams {
    let flip_x = cal.flip_image_x != 0.0;
    let pitch_px = cal.pitch * (cal.screen_w / cal.dpi) * (1.0 / cal.slope.abs()).atan().cos();
    let mut tan_alpha = cal.screen_h / (cal.screen_w * cal.slope);
    if flip_x {
        tan_alpha = -tan_alpha;
    }
    MappingParams {
        pitch_px,
        tan_alpha,
        offset: cal.center,
        total_views: layout.total_views(),
        flip_x,
        flip_y: cal.flip_image_y != 0.0,
        flip_subpixel: cal.flip_subp != 0.0,
        inverted_views: cal.inv_view != 0.0,
    }
}
