//! Streaming configuration: the `.ini` files that describe where stereo
//! frames come from and the resolutions of each pipeline stage.
//!
//! Three source shapes exist. `devNumber=-1` plus a `file` key streams from
//! a pre-extracted frame directory; `devNumber=N` in `[camera]` streams
//! side-by-side frames from capture directory N; `[camera0]`/`[camera1]`
//! sections stream a dedicated directory per eye.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameSourceSpec {
    /// One capture stream of side-by-side L|R frames.
    SingleDevice { dev: u32 },
    /// Two capture streams, one per eye.
    DualDevice { dev0: u32, dev1: u32 },
    /// Pre-extracted side-by-side frames named after a source clip.
    File { path: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamConfig {
    pub camera_width: u32,
    pub camera_height: u32,
    /// Target pacing in frames per second.
    pub fps: u32,
    pub source: FrameSourceSpec,
    /// Resolution the morphing stage runs at (one view).
    pub processing_width: u32,
    pub processing_height: u32,
    pub native_width: u32,
    pub native_height: u32,
}

impl StreamConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("camera.width", self.camera_width),
            ("camera.height", self.camera_height),
            ("camera.fps", self.fps),
            ("processing.width", self.processing_width),
            ("processing.height", self.processing_height),
            ("native.width", self.native_width),
            ("native.height", self.native_height),
        ] {
            if v < 1 {
                return Err(Error::InvariantViolation(name.to_string()));
            }
        }
        Ok(())
    }

    /// Canonical writer; `parse_stream_config` inverts it exactly.
    pub fn to_ini(&self) -> String {
        let mut out = String::from("[camera]\n");
        match &self.source {
            FrameSourceSpec::SingleDevice { dev } => {
                out.push_str(&format!("devNumber={dev}\n"));
            }
            FrameSourceSpec::File { .. } => {
                out.push_str("devNumber=-1\n");
            }
            FrameSourceSpec::DualDevice { .. } => {}
        }
        out.push_str(&format!("width={}\n", self.camera_width));
        out.push_str(&format!("height={}\n", self.camera_height));
        out.push_str(&format!("fps={}\n", self.fps));
        match &self.source {
            FrameSourceSpec::File { path } => {
                out.push_str(&format!("file=\"{path}\"\n"));
            }
            FrameSourceSpec::DualDevice { dev0, dev1 } => {
                out.push_str(&format!("[camera0]\ndevNumber={dev0}\n"));
                out.push_str(&format!("[camera1]\ndevNumber={dev1}\n"));
            }
            FrameSourceSpec::SingleDevice { .. } => {}
        }
        out.push_str(&format!(
            "[processing]\nwidth={}\nheight={}\n",
            self.processing_width, self.processing_height
        ));
        out.push_str(&format!(
            "[native]\nwidth={}\nheight={}\n",
            self.native_width, self.native_height
        ));
        out
    }
}

struct RawSection {
    name: String,
    keys: Vec<(String, String, usize)>, // key, value, line number
}

/// Line-oriented INI scan: `[section]` headers, `key=value` pairs, `#`/`;`
/// comment lines, blank lines. Values may be double-quoted.
fn scan_ini(text: &str) -> Result<Vec<RawSection>> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (number, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        let number = number + 1;
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::IniSyntax {
                line: number,
                message: "unterminated section header".into(),
            })?;
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::IniSyntax {
                    line: number,
                    message: "empty section name".into(),
                });
            }
            sections.push(RawSection {
                name: name.to_string(),
                keys: Vec::new(),
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::IniSyntax {
            line: number,
            message: "expected key=value".into(),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::IniSyntax {
                line: number,
                message: "empty key".into(),
            });
        }
        let mut value = value.trim();
        if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
            value = &value[1..value.len() - 1];
        }
        let section = sections.last_mut().ok_or_else(|| Error::IniSyntax {
            line: number,
            message: "key outside of any [section]".into(),
        })?;
        section.keys.push((key.to_string(), value.to_string(), number));
    }
    Ok(sections)
}

struct Section<'a> {
    name: &'a str,
    keys: &'a [(String, String, usize)],
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<(&'a str, usize)> {
        // last occurrence wins, mirroring common INI behavior
        self.keys
            .iter()
            .rev()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, line)| (v.as_str(), *line))
    }

    fn integer(&self, key: &str) -> Result<Option<(i64, usize)>> {
        match self.get(key) {
            None => Ok(None),
            Some((text, line)) => {
                let value: i64 = text.parse().map_err(|_| Error::IniSyntax {
                    line,
                    message: format!("'{text}' is not an integer (key {key})"),
                })?;
                Ok(Some((value, line)))
            }
        }
    }

    fn required_dim(&self, key: &str) -> Result<u32> {
        let (value, line) = self
            .integer(key)?
            .ok_or_else(|| Error::MissingKey {
                section: self.name.to_string(),
                key: key.to_string(),
            })?;
        // representability only; zero and other semantic limits are
        // validate()'s business
        if !(0..=i64::from(u32::MAX)).contains(&value) {
            return Err(Error::IniSyntax {
                line,
                message: format!("{key}={value} out of range"),
            });
        }
        Ok(value as u32)
    }

    fn warn_unknown(&self, known: &[&str]) {
        for (key, _, line) in self.keys {
            if !known.contains(&key.as_str()) {
                eprintln!(
                    "warning: ignoring unknown key '{key}' in [{}] (line {line})",
                    self.name
                );
            }
        }
    }
}

// Last section with this name wins when the file repeats one.
fn find_section<'a>(raw: &'a [RawSection], name: &'a str) -> Option<Section<'a>> {
    raw.iter()
        .rev()
        .find(|s| s.name == name)
        .map(|s| Section {
            name,
            keys: &s.keys,
        })
}

pub fn parse_stream_config(text: &str) -> Result<StreamConfig> {
    let raw = scan_ini(text)?;
    let find = |name| find_section(&raw, name);
    for section in &raw {
        if !["camera", "camera0", "camera1", "processing", "native"]
            .contains(&section.name.as_str())
        {
            eprintln!("warning: ignoring unknown section [{}]", section.name);
        }
    }

    let camera = find("camera").ok_or_else(|| Error::MissingSection("camera".into()))?;
    camera.warn_unknown(&["devNumber", "width", "height", "fps", "file"]);
    let camera_width = camera.required_dim("width")?;
    let camera_height = camera.required_dim("height")?;
    let fps = camera.required_dim("fps")?;
    let dev_number = camera.integer("devNumber")?;
    let file = camera.get("file");

    let cam0 = find("camera0");
    let cam1 = find("camera1");
    let source = match (cam0, cam1) {
        (Some(c0), Some(c1)) => {
            if file.is_some() {
                return Err(Error::ConflictingSources(
                    "both a file source and [camera0]/[camera1] sections".into(),
                ));
            }
            if matches!(dev_number, Some((d, _)) if d >= 0) {
                return Err(Error::ConflictingSources(
                    "both [camera] devNumber and [camera0]/[camera1] sections".into(),
                ));
            }
            c0.warn_unknown(&["devNumber"]);
            c1.warn_unknown(&["devNumber"]);
            let dev_of = |c: &Section<'_>| -> Result<u32> {
                let (value, line) =
                    c.integer("devNumber")?.ok_or_else(|| Error::MissingKey {
                        section: c.name.to_string(),
                        key: "devNumber".to_string(),
                    })?;
                if !(0..=i64::from(u32::MAX)).contains(&value) {
                    return Err(Error::IniSyntax {
                        line,
                        message: format!("devNumber={value} out of range"),
                    });
                }
                Ok(value as u32)
            };
            FrameSourceSpec::DualDevice {
                dev0: dev_of(&c0)?,
                dev1: dev_of(&c1)?,
            }
        }
        (Some(_), None) => return Err(Error::MissingSection("camera1".into())),
        (None, Some(_)) => return Err(Error::MissingSection("camera0".into())),
        (None, None) => {
            let (dev, line) = dev_number.ok_or_else(|| Error::MissingKey {
                section: "camera".into(),
                key: "devNumber".into(),
            })?;
            if dev == -1 {
                let (path, _) = file.ok_or_else(|| Error::MissingKey {
                    section: "camera".into(),
                    key: "file".into(),
                })?;
                FrameSourceSpec::File {
                    path: path.to_string(),
                }
            } else if dev >= 0 {
                if file.is_some() {
                    return Err(Error::ConflictingSources(
                        "both devNumber >= 0 and a file source".into(),
                    ));
                }
                FrameSourceSpec::SingleDevice { dev: dev as u32 }
            } else {
                return Err(Error::IniSyntax {
                    line,
                    message: format!("devNumber={dev} out of range"),
                });
            }
        }
    };

    let processing =
        find("processing").ok_or_else(|| Error::MissingSection("processing".into()))?;
    processing.warn_unknown(&["width", "height"]);
    let native = find("native").ok_or_else(|| Error::MissingSection("native".into()))?;
    native.warn_unknown(&["width", "height"]);

    let config = StreamConfig {
        camera_width,
        camera_height,
        fps,
        source,
        processing_width: processing.required_dim("width")?,
        processing_height: processing.required_dim("height")?,
        native_width: native.required_dim("width")?,
        native_height: native.required_dim("height")?,
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Pre-recorded clip source, every key the schema knows about.
    pub(crate) const FILE_SOURCE_INI: &str = "\
[camera]
devNumber=-1
width=320
height=180
fps=8
file=\"video_rescaled.mp4\"
[processing]
width=256
height=128
[native]
width=2560
height=1600
";

    pub(crate) const SINGLE_DEVICE_INI: &str = "\
[camera]
devNumber=2
width=320
height=180
fps=8
[processing]
width=256
height=128
[native]
width=2560
height=1600
";

    pub(crate) const DUAL_DEVICE_INI: &str = "\
[camera]
width=320
height=180
fps=8
[camera0]
devNumber=2
[camera1]
devNumber=4
[processing]
width=256
height=128
[native]
width=2560
height=1600
";

    #[test]
    fn file_source_listing_parses_exactly() {
        let cfg = parse_stream_config(FILE_SOURCE_INI).unwrap();
        assert_eq!(
            cfg,
            StreamConfig {
                camera_width: 320,
                camera_height: 180,
                fps: 8,
                source: FrameSourceSpec::File {
                    path: "video_rescaled.mp4".into()
                },
                processing_width: 256,
                processing_height: 128,
                native_width: 2560,
                native_height: 1600,
            }
        );
    }

    #[test]
    fn single_device_listing_parses_exactly() {
        let cfg = parse_stream_config(SINGLE_DEVICE_INI).unwrap();
        assert_eq!(cfg.source, FrameSourceSpec::SingleDevice { dev: 2 });
        assert_eq!(cfg.camera_width, 320);
        assert_eq!(cfg.fps, 8);
    }

    #[test]
    fn dual_device_listing_parses_exactly() {
        let cfg = parse_stream_config(DUAL_DEVICE_INI).unwrap();
        assert_eq!(cfg.source, FrameSourceSpec::DualDevice { dev0: 2, dev1: 4 });
        assert_eq!(cfg.native_width, 2560);
        assert_eq!(cfg.native_height, 1600);
    }

    #[test]
    fn missing_native_section_is_named() {
        let text = FILE_SOURCE_INI.replace("[native]", "[navite]");
        match parse_stream_config(&text) {
            Err(Error::MissingSection(name)) => assert_eq!(name, "native"),
            other => panic!("expected MissingSection, got {other:?}"),
        }
    }

    #[test]
    fn file_plus_dual_sections_conflict() {
        let text = FILE_SOURCE_INI.replace(
            "[processing]",
            "[camera0]\ndevNumber=0\n[camera1]\ndevNumber=1\n[processing]",
        );
        match parse_stream_config(&text) {
            Err(Error::ConflictingSources(_)) => {}
            other => panic!("expected ConflictingSources, got {other:?}"),
        }
    }

    #[test]
    fn file_source_needs_the_file_key() {
        let text = FILE_SOURCE_INI.replace("file=\"video_rescaled.mp4\"\n", "");
        match parse_stream_config(&text) {
            Err(Error::MissingKey { section, key }) => {
                assert_eq!(section, "camera");
                assert_eq!(key, "file");
            }
            other => panic!("expected MissingKey, got {other:?}"),
        }
    }

    #[test]
    fn comments_blanks_and_order_do_not_matter() {
        let shuffled = "\
# streaming configuration
[camera]
fps=8

; device -1 selects a file source
file=\"video_rescaled.mp4\"
height=180
width=320
devNumber=-1
[native]
height=1600
width=2560
[processing]
height=128
width=256
";
        assert_eq!(
            parse_stream_config(shuffled).unwrap(),
            parse_stream_config(FILE_SOURCE_INI).unwrap()
        );
    }

    #[test]
    fn zero_fps_violates_invariants() {
        let text = SINGLE_DEVICE_INI.replace("fps=8", "fps=0");
        match parse_stream_config(&text) {
            Err(Error::InvariantViolation(name)) => assert_eq!(name, "camera.fps"),
            other => panic!("expected InvariantViolation, got {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "[camera]\ndevNumber=2\nwidth\n";
        match parse_stream_config(text) {
            Err(Error::IniSyntax { line: 3, .. }) => {}
            other => panic!("expected IniSyntax at line 3, got {other:?}"),
        }
    }

    #[test]
    fn non_integer_dimension_is_a_syntax_error() {
        let text = SINGLE_DEVICE_INI.replace("width=320", "width=wide");
        match parse_stream_config(&text) {
            Err(Error::IniSyntax { line: 3, message }) => {
                assert!(message.contains("wide"), "{message}");
            }
            other => panic!("expected IniSyntax, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_tolerated() {
        let text = SINGLE_DEVICE_INI.replace("fps=8", "fps=8\nexposure=auto");
        let cfg = parse_stream_config(&text).unwrap();
        assert_eq!(cfg.fps, 8);
    }

    #[test]
    fn keys_before_any_section_are_rejected() {
        match parse_stream_config("width=320\n[camera]\n") {
            Err(Error::IniSyntax { line: 1, .. }) => {}
            other => panic!("expected IniSyntax at line 1, got {other:?}"),
        }
    }

    prop_compose! {
        fn arb_config()(
            camera_width in 1u32..4096,
            camera_height in 1u32..4096,
            fps in 1u32..240,
            processing_width in 1u32..2048,
            processing_height in 1u32..2048,
            native_width in 1u32..8192,
            native_height in 1u32..8192,
            source_kind in 0u8..3,
            dev0 in 0u32..16,
            dev1 in 0u32..16,
            path in "[a-zA-Z0-9_./-]{1,32}",
        ) -> StreamConfig {
            let source = match source_kind {
                0 => FrameSourceSpec::SingleDevice { dev: dev0 },
                1 => FrameSourceSpec::DualDevice { dev0, dev1 },
                _ => FrameSourceSpec::File { path },
            };
            StreamConfig {
                camera_width,
                camera_height,
                fps,
                source,
                processing_width,
                processing_height,
                native_width,
                native_height,
            }
        }
    }

    proptest! {
        #[test]
        fn canonical_writer_round_trips(cfg in arb_config()) {
            let text = cfg.to_ini();
            let back = parse_stream_config(&text).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
