//! Line-oriented netlist format for single-photon circuits.
//!
//! ```text
//! netlist   = { line "\n" } ;
//! line      = [ ws ] [ statement ] [ ws ] [ comment ] ;
//! comment   = "#" { any character } ;
//! statement = kind { ws field } ;
//! field     = key "=" value ;
//! kind      = "source" | "mask" | "hwp" | "dove" | "pbs" | "bs" | "gp"
//!           | "mirror" | "mzim" | "cnot" | "detector" ;
//! key       = "theta" | "ref" | "phi" | "mode" | "pol" | "id" | "in" | "out" ;
//! value     = number | ident | pathlist ;
//! pathlist  = ident { "," ident } ;
//! number    = [ "+" | "-" ] ( digits [ "." digits ] | "." digits ) ;
//! ident     = ( letter | "_" ) { letter | digit | "_" } ;
//! ws        = ( " " | "\t" ) { " " | "\t" } ;
//! ```
//!
//! Fields may appear in any order; each key at most once per line. `theta`
//! is in degrees, `phi` in radians. `ref` and `pol` take `H` or `V`, `mode`
//! takes `h` or `v`.
//!
//! | kind       | params                         | in  | out |
//! |------------|--------------------------------|-----|-----|
//! | `source`   | `pol`, optional `mode`         | 0   | 1   |
//! | `mask`     | `mode`                         | 1   | 1   |
//! | `hwp`      | `theta`, optional `ref` (H)    | 1   | 1   |
//! | `dove`     | `theta`                        | 1   | 1   |
//! | `gp`       | `phi`                          | 1   | 1   |
//! | `mirror`   |                                | 1   | 1   |
//! | `cnot`     |                                | 1   | 1   |
//! | `pbs`      |                                | 1–2 | 2   |
//! | `bs`       |                                | 1–2 | 2   |
//! | `mzim`     |                                | 1–2 | 2   |
//! | `detector` | `id`                           | 1   | 0   |
//!
//! Paths are wires. Each label is produced once, by `source` or by an
//! element output, and consumed at most once. An element may consume and
//! re-produce the same label (`in=p out=p`). Labels consumed without being
//! produced are circuit inputs; a missing second input port of a two-port
//! element is vacuum. Every produced label must end in a detector, except
//! the outputs of the last optical element, which are the circuit's open
//! outputs.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use super::NetlistError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

/// First-order Hermite-Gaussian transverse mode: `h` is HG01, `v` is HG10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransverseMode {
    H,
    V,
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

impl fmt::Display for TransverseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransverseMode::H => "h",
            TransverseMode::V => "v",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    Source { pol: Polarization, mode: Option<TransverseMode> },
    Mask { mode: TransverseMode },
    Hwp { theta_deg: f64, reference: Polarization },
    Dove { theta_deg: f64 },
    Pbs,
    Bs,
    GlassPlate { phi: f64 },
    Mirror,
    Mzim,
    Cnot,
    Detector { id: String },
}

impl ElementKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            ElementKind::Source { .. } => "source",
            ElementKind::Mask { .. } => "mask",
            ElementKind::Hwp { .. } => "hwp",
            ElementKind::Dove { .. } => "dove",
            ElementKind::Pbs => "pbs",
            ElementKind::Bs => "bs",
            ElementKind::GlassPlate { .. } => "gp",
            ElementKind::Mirror => "mirror",
            ElementKind::Mzim => "mzim",
            ElementKind::Cnot => "cnot",
            ElementKind::Detector { .. } => "detector",
        }
    }

    /// Number of input ports (two-port elements accept one or two bindings).
    pub fn input_ports(&self) -> usize {
        match self {
            ElementKind::Source { .. } => 0,
            ElementKind::Pbs | ElementKind::Bs | ElementKind::Mzim => 2,
            _ => 1,
        }
    }

    pub fn output_ports(&self) -> usize {
        match self {
            ElementKind::Detector { .. } => 0,
            ElementKind::Pbs | ElementKind::Bs | ElementKind::Mzim => 2,
            _ => 1,
        }
    }
}

/// One netlist statement with its port bindings.
#[derive(Debug, Clone)]
pub struct Element {
    pub kind: ElementKind,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// 1-based source line.
    pub line: usize,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.inputs == other.inputs && self.outputs == other.outputs
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.keyword())?;
        match &self.kind {
            ElementKind::Source { pol, mode } => {
                write!(f, " pol={pol}")?;
                if let Some(m) = mode {
                    write!(f, " mode={m}")?;
                }
            }
            ElementKind::Mask { mode } => write!(f, " mode={mode}")?,
            ElementKind::Hwp { theta_deg, reference } => write!(f, " theta={theta_deg} ref={reference}")?,
            ElementKind::Dove { theta_deg } => write!(f, " theta={theta_deg}")?,
            ElementKind::GlassPlate { phi } => write!(f, " phi={phi}")?,
            ElementKind::Detector { id } => write!(f, " id={id}")?,
            ElementKind::Pbs | ElementKind::Bs | ElementKind::Mirror | ElementKind::Mzim | ElementKind::Cnot => {}
        }
        if !self.inputs.is_empty() {
            write!(f, " in={}", self.inputs.join(","))?;
        }
        if !self.outputs.is_empty() {
            write!(f, " out={}", self.outputs.join(","))?;
        }
        Ok(())
    }
}

/// Initial photon: polarization, transverse mode and the path it starts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Prep {
    pub pol: Polarization,
    pub mode: TransverseMode,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorBinding {
    pub id: String,
    pub path: String,
}

/// Validated circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitIR {
    elements: Vec<Element>,
    detectors: Vec<DetectorBinding>,
    path_table: BTreeMap<String, usize>,
    prep: Option<Prep>,
    inputs: Vec<String>,
    open_outputs: Vec<String>,
}

impl CircuitIR {
    /// Optical elements in execution order, `source` and `mask` included.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn detectors(&self) -> &[DetectorBinding] {
        &self.detectors
    }

    /// Label → path index. Indices follow first appearance among the
    /// optical elements, then labels only seen by detectors.
    pub fn path_table(&self) -> &BTreeMap<String, usize> {
        &self.path_table
    }

    pub fn path_index(&self, label: &str) -> Option<usize> {
        self.path_table.get(label).copied()
    }

    pub fn prep(&self) -> Option<&Prep> {
        self.prep.as_ref()
    }

    /// Labels consumed but never produced.
    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    /// Undetected outputs of the last optical element.
    pub fn open_outputs(&self) -> &[String] {
        &self.open_outputs
    }

    pub fn detector_path(&self, id: &str) -> Option<&str> {
        self.detectors.iter().find(|d| d.id == id).map(|d| d.path.as_str())
    }

    /// Canonical text form: one statement per line, detectors last.
    pub fn to_netlist(&self) -> String {
        let mut out = String::new();
        for e in &self.elements {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        for d in &self.detectors {
            out.push_str(&format!("detector id={} in={}\n", d.id, d.path));
        }
        out
    }
}

impl fmt::Display for CircuitIR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_netlist())
    }
}

/// Parses and validates a netlist.
pub fn parse_netlist(text: &str) -> Result<CircuitIR, NetlistError> {
    let mut statements = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        if let Some(e) = parse_line(raw, idx + 1)? {
            statements.push(e);
        }
    }
    validate(statements)
}

/// Substitutes `{name}` placeholders. Unknown or unterminated placeholders
/// are syntax errors at their position.
pub fn render_template(text: &str, values: &HashMap<String, String>) -> Result<String, NetlistError> {
    let mut out = String::with_capacity(text.len());
    for (idx, line) in text.split_inclusive('\n').enumerate() {
        let mut rest = line;
        let mut col_offset = 0;
        while let Some(start) = rest.find('{') {
            let column = col_offset + rest[..start].chars().count() + 1;
            out.push_str(&rest[..start]);
            let after = &rest[start + 1..];
            let Some(end) = after.find('}') else {
                return Err(syntax(idx + 1, column, "unterminated placeholder"));
            };
            let name = &after[..end];
            let value = values
                .get(name)
                .ok_or_else(|| syntax(idx + 1, column, &format!("no value for placeholder `{name}`")))?;
            out.push_str(value);
            col_offset = column + name.chars().count() + 1;
            rest = &after[end + 1..];
        }
        out.push_str(rest);
    }
    Ok(out)
}

fn syntax(line: usize, column: usize, message: &str) -> NetlistError {
    NetlistError::Syntax { line, column, message: message.to_string() }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_decimal(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    match frac {
        None => !int.is_empty() && digits(int),
        Some(f) => digits(int) && digits(f) && !f.is_empty(),
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in line.char_indices().enumerate() {
        if ch == ' ' || ch == '\t' {
            if let Some((b, c)) = start.take() {
                tokens.push(Token { text: &line[b..byte], column: c + 1 });
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        tokens.push(Token { text: &line[b..], column: c + 1 });
    }
    tokens
}

fn parse_line(raw: &str, line: usize) -> Result<Option<Element>, NetlistError> {
    let content = raw.strip_suffix('\r').unwrap_or(raw);
    let content = match content.find('#') {
        Some(i) => &content[..i],
        None => content,
    };
    let tokens = tokenize(content);
    let Some((head, fields)) = tokens.split_first() else {
        return Ok(None);
    };
    if let Some((col, ch)) = content.chars().enumerate().find(|(_, c)| c.is_whitespace() && *c != ' ' && *c != '\t') {
        return Err(syntax(line, col + 1, &format!("unexpected character {ch:?}")));
    }

    const KINDS: [&str; 11] =
        ["source", "mask", "hwp", "dove", "pbs", "bs", "gp", "mirror", "mzim", "cnot", "detector"];
    if !KINDS.contains(&head.text) {
        if !is_ident(head.text) {
            return Err(syntax(line, head.column, &format!("expected element kind, found `{}`", head.text)));
        }
        return Err(NetlistError::UnknownElement { line, column: head.column, name: head.text.to_string() });
    }

    let mut values: HashMap<&str, (&str, usize)> = HashMap::new();
    for tok in fields {
        let Some((key, value)) = tok.text.split_once('=') else {
            return Err(syntax(line, tok.column, &format!("expected key=value, found `{}`", tok.text)));
        };
        let value_col = tok.column + key.chars().count() + 1;
        if value.is_empty() {
            return Err(syntax(line, value_col, &format!("missing value for `{key}`")));
        }
        if values.insert(key, (value, value_col)).is_some() {
            return Err(syntax(line, tok.column, &format!("duplicate key `{key}`")));
        }
    }

    let allowed: &[&str] = match head.text {
        "source" => &["pol", "mode", "out"],
        "mask" => &["mode", "in", "out"],
        "hwp" => &["theta", "ref", "in", "out"],
        "dove" => &["theta", "in", "out"],
        "gp" => &["phi", "in", "out"],
        "detector" => &["id", "in"],
        _ => &["in", "out"],
    };
    for tok in fields {
        let key = tok.text.split_once('=').map(|(k, _)| k).unwrap_or_default();
        if !allowed.contains(&key) {
            return Err(syntax(line, tok.column, &format!("`{}` does not take `{key}`", head.text)));
        }
    }

    let required = |key: &str| {
        values.get(key).copied().ok_or_else(|| syntax(line, head.column, &format!("`{}` requires `{key}`", head.text)))
    };
    let number = |key: &str| -> Result<f64, NetlistError> {
        let (v, col) = required(key)?;
        if !is_decimal(v) {
            return Err(syntax(line, col, &format!("`{key}` must be a decimal number, found `{v}`")));
        }
        let x: f64 = v.parse().map_err(|_| syntax(line, col, "invalid number"))?;
        if !x.is_finite() {
            return Err(syntax(line, col, &format!("`{key}` is not finite")));
        }
        Ok(x)
    };
    let pol_value = |(v, col): (&str, usize)| match v {
        "H" => Ok(Polarization::H),
        "V" => Ok(Polarization::V),
        _ => Err(syntax(line, col, &format!("polarization must be H or V, found `{v}`"))),
    };
    let mode_value = |(v, col): (&str, usize)| match v {
        "h" => Ok(TransverseMode::H),
        "v" => Ok(TransverseMode::V),
        _ => Err(syntax(line, col, &format!("mode must be h or v, found `{v}`"))),
    };

    let kind = match head.text {
        "source" => ElementKind::Source {
            pol: pol_value(required("pol")?)?,
            mode: values.get("mode").copied().map(mode_value).transpose()?,
        },
        "mask" => ElementKind::Mask { mode: mode_value(required("mode")?)? },
        "hwp" => ElementKind::Hwp {
            theta_deg: number("theta")?,
            reference: values.get("ref").copied().map(pol_value).transpose()?.unwrap_or(Polarization::H),
        },
        "dove" => ElementKind::Dove { theta_deg: number("theta")? },
        "gp" => ElementKind::GlassPlate { phi: number("phi")? },
        "pbs" => ElementKind::Pbs,
        "bs" => ElementKind::Bs,
        "mirror" => ElementKind::Mirror,
        "mzim" => ElementKind::Mzim,
        "cnot" => ElementKind::Cnot,
        "detector" => {
            let (id, col) = required("id")?;
            if !is_ident(id) {
                return Err(syntax(line, col, &format!("detector id must be an identifier, found `{id}`")));
            }
            ElementKind::Detector { id: id.to_string() }
        }
        _ => unreachable!("kind checked above"),
    };

    let path_list = |key: &str, min: usize, max: usize| -> Result<Vec<String>, NetlistError> {
        if max == 0 {
            return Ok(Vec::new());
        }
        let (v, col) = required(key)?;
        let mut paths = Vec::new();
        let mut offset = 0;
        for part in v.split(',') {
            if !is_ident(part) {
                return Err(syntax(line, col + offset, &format!("invalid path name `{part}`")));
            }
            offset += part.chars().count() + 1;
            paths.push(part.to_string());
        }
        if paths.len() < min || paths.len() > max {
            let want = if min == max { format!("{min}") } else { format!("{min} to {max}") };
            return Err(syntax(
                line,
                col,
                &format!("`{}` takes {want} `{key}` path(s), found {}", head.text, paths.len()),
            ));
        }
        let unique: HashSet<&String> = paths.iter().collect();
        if unique.len() != paths.len() {
            return Err(syntax(line, col, &format!("repeated path in `{key}`")));
        }
        Ok(paths)
    };
    let n_in = kind.input_ports();
    let n_out = kind.output_ports();
    let inputs = path_list("in", 1, n_in)?;
    let outputs = path_list("out", n_out, n_out)?;

    Ok(Some(Element { kind, inputs, outputs, line }))
}

#[derive(Clone, Copy, PartialEq)]
enum PathStatus {
    Live,
    Consumed,
    Detected,
}

fn validate(statements: Vec<Element>) -> Result<CircuitIR, NetlistError> {
    let mut status: HashMap<String, (PathStatus, usize)> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut inputs = Vec::new();
    let mut elements = Vec::new();
    let mut detectors: Vec<DetectorBinding> = Vec::new();
    let mut detector_only: Vec<String> = Vec::new();
    let mut source: Option<(Polarization, Option<TransverseMode>, String, usize)> = None;
    let mut mask: Option<(TransverseMode, String, String, usize)> = None;

    for e in statements {
        for p in &e.inputs {
            match status.get(p) {
                Some((PathStatus::Detected, _)) => {
                    return Err(NetlistError::DetectorNotTerminal { line: e.line, path: p.clone() });
                }
                Some((PathStatus::Consumed, _)) => {
                    return Err(NetlistError::PathAlreadyConsumed { line: e.line, path: p.clone() });
                }
                Some((PathStatus::Live, _)) => {}
                None => inputs.push(p.clone()),
            }
            let is_detector = matches!(e.kind, ElementKind::Detector { .. });
            if !order.contains(p) {
                if is_detector {
                    detector_only.push(p.clone());
                } else {
                    order.push(p.clone());
                }
            }
            let next = if is_detector { PathStatus::Detected } else { PathStatus::Consumed };
            status.insert(p.clone(), (next, e.line));
        }
        for p in &e.outputs {
            let reclaimed = e.inputs.contains(p);
            if status.contains_key(p) && !reclaimed {
                return Err(NetlistError::DuplicateProducer { line: e.line, path: p.clone() });
            }
            status.insert(p.clone(), (PathStatus::Live, e.line));
            if !order.contains(p) {
                order.push(p.clone());
            }
        }

        match &e.kind {
            ElementKind::Detector { id } => {
                if detectors.iter().any(|d| &d.id == id) {
                    return Err(NetlistError::DuplicateDetector { line: e.line, id: id.clone() });
                }
                detectors.push(DetectorBinding { id: id.clone(), path: e.inputs[0].clone() });
                continue;
            }
            ElementKind::Source { pol, mode } => {
                if source.is_some() {
                    return Err(NetlistError::InvalidPrep { line: e.line, message: "more than one source".into() });
                }
                source = Some((*pol, *mode, e.outputs[0].clone(), e.line));
            }
            ElementKind::Mask { mode } => {
                let feeds_from_source = source.as_ref().is_some_and(|s| s.2 == e.inputs[0]);
                if !feeds_from_source || mask.is_some() {
                    return Err(NetlistError::InvalidPrep {
                        line: e.line,
                        message: "a mask must directly follow the source output".into(),
                    });
                }
                mask = Some((*mode, e.inputs[0].clone(), e.outputs[0].clone(), e.line));
            }
            _ => {}
        }
        elements.push(e);
    }
    order.extend(detector_only.into_iter().filter(|p| !order.contains(p)).collect::<Vec<_>>());

    let open_outputs: Vec<String> = elements
        .last()
        .map(|e| e.outputs.iter().filter(|p| matches!(status.get(*p), Some((PathStatus::Live, _)))).cloned().collect())
        .unwrap_or_default();
    let mut dangling: Vec<(usize, &String)> = status
        .iter()
        .filter(|(p, (s, _))| *s == PathStatus::Live && !open_outputs.contains(p))
        .map(|(p, (_, line))| (*line, p))
        .collect();
    dangling.sort();
    if let Some((line, path)) = dangling.first() {
        return Err(NetlistError::DanglingPath { line: *line, path: (*path).clone() });
    }

    let prep = match source {
        None => None,
        Some((pol, source_mode, path, line)) => {
            let mode = mask.as_ref().map(|m| m.0).or(source_mode).ok_or(NetlistError::InvalidPrep {
                line,
                message: "source has no mode and no mask follows it".into(),
            })?;
            Some(Prep { pol, mode, path })
        }
    };

    let path_table = order.into_iter().enumerate().map(|(i, p)| (p, i)).collect();
    Ok(CircuitIR { elements, detectors, path_table, prep, inputs, open_outputs })
}
