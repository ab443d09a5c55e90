//! JSON documents: input parsing, the analysis pipeline, output rendering
//! (JSON and plain text) and batch processing.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::atlas::{build_atlas, stratum_label, Atlas};
use crate::classify::TupleKind;
use crate::degree::DegreeValue;
use crate::error::{AtlasError, Result};
use crate::poset::{maximal_filtration, BkPoset};
use crate::support::{normalize, SupportTuple};
use crate::volume::mixed_volume;

pub const SCHEMA_VERSION: &str = "1";

const SAFE_INTEGER: i64 = 1 << 53;

/// Default cap on the number of enumerated subsets.
pub const DEFAULT_MAX_SUBSETS: u64 = 1 << 20;

/// Integers within the 53-bit safe range become JSON numbers, larger ones
/// decimal strings.
pub fn big_json(v: &BigInt) -> Value {
    match i64::try_from(v) {
        Ok(x) if x.abs() <= SAFE_INTEGER => json!(x),
        _ => Value::String(v.to_string()),
    }
}

pub(crate) fn big_number<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    big_json(v).serialize(s)
}

pub(crate) fn big_rows<S: Serializer>(
    rows: &[Vec<BigInt>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Vec<Value>> = rows.iter().map(|r| r.iter().map(big_json).collect()).collect();
    v.serialize(s)
}

pub fn degree_json(d: &DegreeValue) -> Value {
    match d {
        DegreeValue::Known(v) => json!({"status": "known", "value": big_json(v)}),
        DegreeValue::Unsupported { reason } => json!({"status": "unsupported", "reason": reason}),
        DegreeValue::NotAHypersurface { value } => {
            json!({"status": "not_a_hypersurface", "value": big_json(value)})
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| AtlasError::Invariant(format!("serialization failed: {e}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default = "default_max_subsets")]
    pub max_subsets: u64,
    #[serde(default = "default_true")]
    pub compute_degrees: bool,
}

fn default_max_subsets() -> u64 {
    DEFAULT_MAX_SUBSETS
}

fn default_true() -> bool {
    true
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_subsets: DEFAULT_MAX_SUBSETS,
            compute_degrees: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    #[serde(default)]
    pub schema_version: Option<String>,
    pub ambient_rank: usize,
    pub supports: Vec<Vec<Vec<i64>>>,
    #[serde(default)]
    pub options: Options,
}

impl InputDocument {
    pub fn new(t: &SupportTuple) -> Self {
        InputDocument {
            schema_version: Some(SCHEMA_VERSION.into()),
            ambient_rank: t.ambient_rank(),
            supports: t.supports().iter().map(|s| s.points().to_vec()).collect(),
            options: Options::default(),
        }
    }

    pub fn from_value(v: Value) -> Result<Self> {
        let doc: InputDocument =
            serde_json::from_value(v).map_err(|e| AtlasError::Parse(e.to_string()))?;
        if let Some(version) = &doc.schema_version {
            if version != SCHEMA_VERSION {
                return Err(AtlasError::Parse(format!(
                    "unsupported schema_version {version:?}, expected {SCHEMA_VERSION:?}"
                )));
            }
        }
        Ok(doc)
    }

    /// Validates the document and builds the tuple, enforcing `max_subsets`.
    pub fn tuple(&self) -> Result<SupportTuple> {
        let t = SupportTuple::from_points(self.ambient_rank, self.supports.clone())?;
        let k = t.len();
        let count = 1u128 << k.min(127);
        if count > u128::from(self.options.max_subsets) {
            let bound = 63 - self.options.max_subsets.max(1).leading_zeros() as usize;
            return Err(AtlasError::TooLarge { supports: k, bound });
        }
        Ok(t)
    }
}

/// Parsed input: a single document or a batch (a JSON array).
pub enum Input {
    Single(Result<InputDocument>),
    Batch(Vec<Result<InputDocument>>),
}

pub fn parse_input(text: &str) -> Input {
    match serde_json::from_str::<Value>(text) {
        Err(e) => Input::Single(Err(AtlasError::Parse(e.to_string()))),
        Ok(Value::Array(items)) => {
            Input::Batch(items.into_iter().map(InputDocument::from_value).collect())
        }
        Ok(v) => Input::Single(InputDocument::from_value(v)),
    }
}

/// A rendered analysis result. Keys are sorted, so rendering is
/// deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputDocument(pub Value);

impl OutputDocument {
    pub fn render(&self) -> String {
        serde_json::to_string_pretty(&self.0).expect("JSON values always serialize")
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map(OutputDocument)
            .map_err(|e| AtlasError::Parse(e.to_string()))
    }

    pub fn value(&self) -> &Value {
        &self.0
    }

    pub fn is_error(&self) -> bool {
        self.0.get("error").is_some()
    }
}

/// What to compute for each input document.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Analyze,
    MixedVolume,
    Decompose,
    Degrees,
}

fn envelope(fields: Map<String, Value>) -> OutputDocument {
    let mut m = fields;
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    OutputDocument(Value::Object(m))
}

pub fn error_document(e: &AtlasError) -> OutputDocument {
    let mut m = Map::new();
    m.insert(
        "error".into(),
        json!({"kind": e.kind(), "message": e.to_string(), "internal": e.is_internal()}),
    );
    envelope(m)
}

fn poset_json(p: &BkPoset) -> Result<Value> {
    let elements: Vec<Value> = p
        .elements
        .iter()
        .map(|el| {
            Ok(json!({
                "id": el.id,
                "label": stratum_label(&el.principal_ideal),
                "block": to_value(&el.block)?,
                "principal_ideal": to_value(&el.principal_ideal)?,
                "quotient": to_value(&el.quotient)?,
                "quotient_mixed_volume": big_json(&el.quotient_mixed_volume),
                "class": to_value(&el.irr_class)?,
                "height": p.heights[el.id],
            }))
        })
        .collect::<Result<_>>()?;
    Ok(json!({
        "elements": elements,
        "covers": p.covers.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "maximal": p.maximal_elements(),
        "minimal": p.minimal_elements(),
        "simple": p.is_simple(),
        "components": p.components(),
        "filtration": maximal_filtration(p),
    }))
}

fn degree_table(atlas: &Atlas) -> Value {
    let mut rows = Vec::new();
    for r in atlas.reports() {
        for c in &r.components {
            if let Some(d) = &c.degree {
                rows.push(json!({
                    "report": r.kind,
                    "label": c.label,
                    "degree": degree_json(d),
                }));
            }
        }
    }
    Value::Array(rows)
}

fn mixed_volume_json(t: &SupportTuple) -> Result<Value> {
    Ok(big_json(&mixed_volume(t)?))
}

/// The full pipeline on one document.
pub fn run_analyze(doc: &InputDocument) -> Result<OutputDocument> {
    run_with(doc, Mode::Analyze, doc.options.compute_degrees)
}

/// Runs one document in the given mode; `degrees` overrides the document
/// option when false.
pub fn run_with(doc: &InputDocument, mode: Mode, degrees: bool) -> Result<OutputDocument> {
    let t = doc.tuple()?;
    let mut m = Map::new();
    if mode == Mode::MixedVolume {
        m.insert("mixed_volume".into(), mixed_volume_json(&t)?);
        return Ok(envelope(m));
    }
    let degrees = degrees && doc.options.compute_degrees && mode != Mode::Decompose;
    let atlas = build_atlas(&t, degrees)?;
    let poset = match &atlas.poset {
        Some(p) => poset_json(p)?,
        None => Value::Null,
    };
    match mode {
        Mode::Decompose => {
            if atlas.class.kind != TupleKind::Bk {
                return Err(AtlasError::NotBk);
            }
            m.insert("classification".into(), to_value(&atlas.class)?);
            m.insert("poset".into(), poset);
        }
        Mode::Degrees => {
            m.insert("degrees".into(), degree_table(&atlas));
        }
        Mode::Analyze | Mode::MixedVolume => {
            let (normalized, record) = normalize(&t)?;
            let mut norm = to_value(&record)?;
            norm["supports"] = to_value(&normalized.supports())?;
            m.insert("normalization".into(), norm);
            m.insert("classification".into(), to_value(&atlas.class)?);
            if atlas.class.kind == TupleKind::Bk {
                m.insert("mixed_volume".into(), mixed_volume_json(&t)?);
            }
            m.insert("poset".into(), poset);
            m.insert("reports".into(), to_value(&atlas.reports())?);
            m.insert(
                "degrees".into(),
                if degrees { degree_table(&atlas) } else { Value::Null },
            );
            m.insert("warnings".into(), to_value(&atlas.warnings)?);
        }
    }
    Ok(envelope(m))
}

/// Result of processing an input text: the output value (an array for
/// batches) and the process exit code.
pub struct Processed {
    pub output: Value,
    pub documents: Vec<OutputDocument>,
    pub exit_code: i32,
}

fn exit_code_of(r: &Result<OutputDocument>) -> i32 {
    match r {
        Ok(_) => 0,
        Err(e) if e.is_internal() => 1,
        Err(_) => 2,
    }
}

/// Parses and runs every document; failures become error documents and do
/// not stop the rest of a batch. The exit code is the worst one seen, with
/// internal errors ranking above input errors.
pub fn process(text: &str, mode: Mode, degrees: bool) -> Processed {
    let run = |d: Result<InputDocument>| d.and_then(|doc| run_with(&doc, mode, degrees));
    let (results, batch) = match parse_input(text) {
        Input::Single(d) => (vec![run(d)], false),
        Input::Batch(ds) => (ds.into_iter().map(run).collect(), true),
    };
    let exit_code = results
        .iter()
        .map(exit_code_of)
        .max_by_key(|&c| match c {
            1 => 2,
            2 => 1,
            _ => 0,
        })
        .unwrap_or(0);
    let documents: Vec<OutputDocument> = results
        .into_iter()
        .map(|r| r.unwrap_or_else(|e| error_document(&e)))
        .collect();
    let output = if batch {
        Value::Array(documents.iter().map(|d| d.0.clone()).collect())
    } else {
        documents[0].0.clone()
    };
    Processed {
        output,
        documents,
        exit_code,
    }
}

fn text_of(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn degree_text(v: &Value) -> String {
    match v.get("status").and_then(Value::as_str) {
        Some("known") => text_of(&v["value"]),
        Some("unsupported") => format!("unsupported ({})", text_of(&v["reason"])),
        Some("not_a_hypersurface") => format!("not a hypersurface (face sum {})", text_of(&v["value"])),
        _ => "-".into(),
    }
}

fn codim_text(v: &Value) -> String {
    match v {
        Value::Object(_) => format!("unsupported ({})", text_of(&v["reason"])),
        other => text_of(other),
    }
}

fn structure_text(v: &Value) -> String {
    let sub = |key: &str| text_of(&v[key]).replace(['[', ']'], "");
    let factors = |sep: &str| -> String {
        v["factors"]
            .as_array()
            .map(|fs| fs.iter().map(structure_text).collect::<Vec<_>>().join(sep))
            .unwrap_or_default()
    };
    match v["node"].as_str() {
        Some("resultant_of") => format!("R{{{}}}", sub("indices")),
        Some("quotient_disc_of") => format!("D({{{}}}/{{{}}})", sub("indices"), sub("modulo")),
        Some("quotient_cayley_disc_of") => {
            format!("Dcay({{{}}}/{{{}}})", sub("indices"), sub("modulo"))
        }
        Some("ambient_factor") => format!("C{{{}}}", sub("indices")),
        Some("bk_mult") => format!("[{}]", factors(" • ")),
        Some("intersection") => format!("({})", factors(" ∩ ")),
        _ => v.to_string(),
    }
}

/// Plain-text rendering of an output document of any mode.
pub fn render_text(doc: &OutputDocument) -> String {
    let v = &doc.0;
    let mut out = String::new();
    if let Some(e) = v.get("error") {
        let _ = writeln!(out, "error [{}]: {}", text_of(&e["kind"]), text_of(&e["message"]));
        return out;
    }
    if let Some(c) = v.get("classification") {
        let _ = writeln!(
            out,
            "class: {} (min defect {}, total defect {})",
            text_of(&c["kind"]),
            c["min_defect"],
            c["total_defect"]
        );
        if let Some(m) = c.get("minimal_subtuple") {
            let _ = writeln!(out, "minimal subtuple: {m}");
        }
        if let Some(cs) = c.get("circuits") {
            let _ = writeln!(out, "circuits: {cs}");
        }
    }
    if let Some(mv) = v.get("mixed_volume") {
        let _ = writeln!(out, "mixed volume: {}", text_of(mv));
    }
    if let Some(p) = v.get("poset").filter(|p| !p.is_null()) {
        let _ = writeln!(out, "poset:");
        for el in p["elements"].as_array().into_iter().flatten() {
            let _ = writeln!(
                out,
                "  {:<12} block {:<10} {} height {} quotient MV {}",
                text_of(&el["label"]),
                el["block"].to_string(),
                text_of(&el["class"]),
                el["height"],
                text_of(&el["quotient_mixed_volume"])
            );
        }
        let _ = writeln!(out, "  covers: {}", p["covers"]);
        let _ = writeln!(out, "  simple: {}", p["simple"]);
    }
    if let Some(reports) = v.get("reports").and_then(Value::as_array) {
        for r in reports {
            let _ = write!(out, "{}:", text_of(&r["kind"]));
            if r["empty"] == json!(true) {
                let _ = writeln!(out, " empty");
                continue;
            }
            if let Some(ci) = r["complete_intersection_codim"].as_u64() {
                let _ = write!(out, " complete intersection of codimension {ci}");
            }
            let _ = writeln!(out);
            for c in r["components"].as_array().into_iter().flatten() {
                let _ = write!(
                    out,
                    "  {:<12} codim {} degree {}  {}",
                    text_of(&c["label"]),
                    codim_text(&c["codim"]),
                    degree_text(&c["degree"]),
                    structure_text(&c["structure"])
                );
                if let Some(a) = c["absorbed_into"].as_str() {
                    let _ = write!(out, "  (absorbed into {a})");
                }
                let _ = writeln!(out);
            }
        }
    } else if let Some(rows) = v.get("degrees").and_then(Value::as_array) {
        for row in rows {
            let _ = writeln!(
                out,
                "{:<12} {:<12} {}",
                text_of(&row["report"]),
                text_of(&row["label"]),
                degree_text(&row["degree"])
            );
        }
    }
    for w in v.get("warnings").and_then(Value::as_array).into_iter().flatten() {
        let _ = writeln!(out, "warning: {}", text_of(w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const VEE: &str = r#"{"schema_version":"1","ambient_rank":3,
        "supports":[[[0,0,0],[1,0,0]],[[0,0,0],[0,1,0]],[[0,0,0],[1,0,0],[0,1,0],[0,0,1]]]}"#;

    #[test]
    fn big_integers_switch_to_strings() {
        assert_eq!(big_json(&BigInt::from(SAFE_INTEGER)), json!(SAFE_INTEGER));
        assert_eq!(
            big_json(&(BigInt::from(SAFE_INTEGER) + 1)),
            json!("9007199254740993")
        );
        assert_eq!(big_json(&BigInt::from(-7)), json!(-7));
    }

    #[test]
    fn analyze_vee() {
        let p = process(VEE, Mode::Analyze, true);
        assert_eq!(p.exit_code, 0);
        let v = &p.output;
        assert_eq!(v["classification"]["kind"], json!("BK"));
        assert_eq!(v["poset"]["elements"].as_array().unwrap().len(), 3);
        assert_eq!(v["reports"][0]["components"].as_array().unwrap().len(), 3);
        assert_eq!(v["reports"][1]["complete_intersection_codim"], json!(2));
        assert_eq!(v["reports"][2]["components"][0]["codim"], json!(2));
        assert_eq!(v["mixed_volume"], json!(1));
        let text = render_text(&p.documents[0]);
        assert!(text.contains("class: BK"), "{text}");
    }

    #[test]
    fn errors_are_documents() {
        let p = process("{not json", Mode::Analyze, true);
        assert_eq!(p.exit_code, 2);
        assert_eq!(p.output["error"]["kind"], json!("ParseError"));

        let under = r#"{"ambient_rank":2,"supports":[[[0,0],[1,0],[0,1]]]}"#;
        let p = process(under, Mode::Analyze, true);
        assert_eq!(p.exit_code, 2);
        assert_eq!(p.output["error"]["kind"], json!("Underdetermined"));

        let empty = r#"{"ambient_rank":1,"supports":[[]]}"#;
        assert_eq!(process(empty, Mode::Analyze, true).output["error"]["kind"], json!("EmptySupport"));

        let big = r#"{"ambient_rank":1,"supports":[[[0],[1]],[[0],[1]],[[0],[1]]],"options":{"max_subsets":4}}"#;
        assert_eq!(process(big, Mode::Analyze, true).output["error"]["kind"], json!("TooLarge"));

        let version = r#"{"schema_version":"2","ambient_rank":1,"supports":[[[0],[1]]]}"#;
        assert_eq!(process(version, Mode::Analyze, true).output["error"]["kind"], json!("ParseError"));
    }

    #[test]
    fn batch_continues_after_failures() {
        let text = format!(r#"[{VEE}, {{"ambient_rank":1}}, {VEE}]"#);
        let p = process(&text, Mode::Degrees, true);
        assert_eq!(p.exit_code, 2);
        let items = p.output.as_array().unwrap();
        assert_eq!(items.len(), 3);
        assert!(items[1].get("error").is_some());
        assert_eq!(items[0], items[2]);
    }

    #[test]
    fn degrees_off_and_round_trip() {
        let p = process(VEE, Mode::Analyze, false);
        assert_eq!(p.output["degrees"], Value::Null);
        assert_eq!(p.output["reports"][0]["components"][0]["degree"], Value::Null);
        let doc = &p.documents[0];
        assert_eq!(&OutputDocument::parse(&doc.render()).unwrap(), doc);
    }

    #[test]
    fn other_modes() {
        let two = r#"{"ambient_rank":2,"supports":[[[0,0],[1,0],[0,1]],[[0,0],[1,0],[0,1]]]}"#;
        assert_eq!(process(two, Mode::MixedVolume, true).output["mixed_volume"], json!(1));
        let dep = r#"{"ambient_rank":1,"supports":[[[0],[1]],[[0],[1]]]}"#;
        let p = process(dep, Mode::Decompose, true);
        assert_eq!(p.output["error"]["kind"], json!("NotBK"));
        let p = process(dep, Mode::Degrees, true);
        assert_eq!(p.output["degrees"][0]["degree"]["value"], json!(2));
    }
}
