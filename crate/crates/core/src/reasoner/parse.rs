use std::collections::BTreeMap;

use thiserror::Error;

use crate::constraints::Level;
use crate::geometry::Vec2;

use super::StepTag;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("no fenced block tagged `{0}`")]
    MissingBlock(StepTag),
    #[error("block `{0}` is empty")]
    EmptyBlock(StepTag),
    #[error("cannot parse line `{0}`")]
    BadLine(String),
    #[error("missing field `{0}`")]
    MissingField(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionClaim {
    pub index: Option<usize>,
    pub velocity: Vec2,
    pub level: Level,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verification {
    pub index: usize,
    pub level: Level,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepPayload {
    Restatement(String),
    /// Per-candidate truth of the step's predicate, keyed by candidate index.
    Verdicts(BTreeMap<usize, bool>),
    Levels(BTreeMap<usize, Option<Level>>),
    Verification(Verification),
    Action(ActionClaim),
}

/// Outcome of parsing one reply. No payload means the parse failed.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub payload: Option<StepPayload>,
}

impl StepResult {
    pub fn from_reply(tag: StepTag, reply: &str) -> StepResult {
        StepResult {
            payload: parse_step(tag, reply).ok(),
        }
    }

    pub fn parse_ok(&self) -> bool {
        self.payload.is_some()
    }
}

/// Body of the last fenced block tagged `tag`, if any.
fn fenced_block(reply: &str, tag: StepTag) -> Option<&str> {
    let opener = format!("```{}", tag.as_str());
    let mut found = None;
    let mut rest = reply;
    let mut offset = 0;
    while let Some(at) = rest.find(&opener) {
        let after = &rest[at + opener.len()..];
        let line_end = after.find('\n');
        // The tag must be the whole info string, so `es` does not match `est`.
        let info_ok = after[..line_end.unwrap_or(after.len())].trim().is_empty();
        if let (true, Some(nl)) = (info_ok, line_end) {
            let body = &after[nl + 1..];
            if let Some(close) = body.find("```") {
                let start = offset + at + opener.len() + nl + 1;
                found = Some(&reply[start..start + close]);
            }
        }
        offset += at + opener.len();
        rest = &reply[offset..];
    }
    found
}

fn content_lines(body: &str) -> impl Iterator<Item = &str> {
    body.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("...") && !l.starts_with('#'))
}

fn key_value(line: &str) -> Result<(&str, &str), ParseError> {
    line.split_once('=')
        .or_else(|| line.split_once(':'))
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| ParseError::BadLine(line.to_owned()))
}

fn candidate_key(key: &str, line: &str) -> Result<usize, ParseError> {
    key.strip_prefix('a')
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| ParseError::BadLine(line.to_owned()))
}

fn parse_bool(v: &str, line: &str) -> Result<bool, ParseError> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" => Ok(true),
        "false" | "no" => Ok(false),
        _ => Err(ParseError::BadLine(line.to_owned())),
    }
}

fn parse_vec(v: &str, line: &str) -> Result<Vec2, ParseError> {
    let inner = v
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    let bad = || ParseError::BadLine(line.to_owned());
    let (x, y) = inner.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    let v = Vec2::new(x, y);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn fields(body: &str) -> Result<BTreeMap<String, (String, String)>, ParseError> {
    let mut out = BTreeMap::new();
    for line in content_lines(body) {
        let (k, v) = key_value(line)?;
        out.insert(k.to_ascii_lowercase(), (v.to_owned(), line.to_owned()));
    }
    Ok(out)
}

/// Parses a backend reply for the step `tag`. Only the last fenced block
/// tagged with the step name is read.
pub fn parse_step(tag: StepTag, reply: &str) -> Result<StepPayload, ParseError> {
    let body = fenced_block(reply, tag).ok_or(ParseError::MissingBlock(tag))?;
    if content_lines(body).next().is_none() {
        return Err(ParseError::EmptyBlock(tag));
    }
    match tag {
        StepTag::State => Ok(StepPayload::Restatement(body.trim().to_owned())),
        StepTag::Es | StepTag::Ed | StepTag::NotEc | StepTag::Et => {
            let mut verdicts = BTreeMap::new();
            for line in content_lines(body) {
                let (k, v) = key_value(line)?;
                verdicts.insert(candidate_key(k, line)?, parse_bool(v, line)?);
            }
            Ok(StepPayload::Verdicts(verdicts))
        }
        StepTag::Levels => {
            let mut levels = BTreeMap::new();
            for line in content_lines(body) {
                let (k, v) = key_value(line)?;
                let level = if v.eq_ignore_ascii_case("none") {
                    None
                } else {
                    Some(
                        v.parse()
                            .map_err(|_| ParseError::BadLine(line.to_owned()))?,
                    )
                };
                levels.insert(candidate_key(k, line)?, level);
            }
            Ok(StepPayload::Levels(levels))
        }
        StepTag::Verify => {
            let f = fields(body)?;
            let get = |k: &'static str| f.get(k).ok_or(ParseError::MissingField(k));
            let (index, line) = get("index")?;
            let index = index
                .trim_start_matches('a')
                .parse()
                .map_err(|_| ParseError::BadLine(line.clone()))?;
            let (level, line) = get("level")?;
            let level = level
                .parse()
                .map_err(|_| ParseError::BadLine(line.clone()))?;
            let (verified, line) = get("verified")?;
            Ok(StepPayload::Verification(Verification {
                index,
                level,
                verified: parse_bool(verified, line)?,
            }))
        }
        StepTag::Action => {
            let f = fields(body)?;
            let (velocity, line) = f
                .get("velocity")
                .ok_or(ParseError::MissingField("velocity"))?;
            let velocity = parse_vec(velocity, line)?;
            let (level, line) = f.get("level").ok_or(ParseError::MissingField("level"))?;
            let level = level
                .parse()
                .map_err(|_| ParseError::BadLine(line.clone()))?;
            let index = match f.get("index") {
                Some((i, line)) => Some(
                    i.trim_start_matches('a')
                        .parse()
                        .map_err(|_| ParseError::BadLine(line.clone()))?,
                ),
                None => None,
            };
            Ok(StepPayload::Action(ActionClaim {
                index,
                velocity,
                level,
            }))
        }
    }
}
