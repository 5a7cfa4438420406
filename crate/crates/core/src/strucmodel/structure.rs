//! Finite base structures and the plain-text model format.
//!
//! ```text
//! # a three-element model
//! carrier: a b c
//! member: a b
//! member: b c
//! unary P: a c
//! index: 3
//! w: 1
//! ```

use super::ultrafilter::FinIndex;
use super::ModelError;

/// A finite carrier with a binary membership-like relation and optional unary relations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinStructure {
    names: Vec<String>,
    member: Vec<bool>,
    unary: Vec<(String, Vec<bool>)>,
}

impl FinStructure {
    /// Carrier `{0, …, size-1}` with the given membership pairs.
    pub fn new(size: usize, pairs: &[(usize, usize)]) -> Result<Self, ModelError> {
        if size == 0 {
            return Err(ModelError::EmptyCarrier);
        }
        let mut member = vec![false; size * size];
        for &(a, b) in pairs {
            if a >= size || b >= size {
                return Err(ModelError::ElementOutOfRange(a.max(b)));
            }
            member[a * size + b] = true;
        }
        Ok(FinStructure {
            names: (0..size).map(|i| i.to_string()).collect(),
            member,
            unary: Vec::new(),
        })
    }

    /// Structure whose membership relation is read from the bits of `relation`
    /// (bit `a*size + b` means `a ∈ b`).
    pub fn from_bits(size: usize, relation: u64) -> Result<Self, ModelError> {
        if size == 0 {
            return Err(ModelError::EmptyCarrier);
        }
        let member = (0..size * size).map(|i| relation & (1 << i) != 0).collect();
        Ok(FinStructure {
            names: (0..size).map(|i| i.to_string()).collect(),
            member,
            unary: Vec::new(),
        })
    }

    pub fn with_unary(mut self, name: &str, holds: Vec<bool>) -> Result<Self, ModelError> {
        if holds.len() != self.size() {
            return Err(ModelError::ElementOutOfRange(holds.len()));
        }
        self.unary.push((name.to_string(), holds));
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn mem(&self, a: usize, b: usize) -> bool {
        self.member[a * self.size() + b]
    }

    pub fn unary_count(&self) -> usize {
        self.unary.len()
    }

    pub fn unary_name(&self, p: usize) -> &str {
        &self.unary[p].0
    }

    pub fn unary(&self, p: usize, a: usize) -> bool {
        self.unary[p].1[a]
    }
}

/// A model file: the structure plus the index set and distinguished point.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub structure: FinStructure,
    pub index: FinIndex,
}

pub fn parse_model(text: &str) -> Result<ModelSpec, ModelError> {
    let mut names: Option<Vec<String>> = None;
    let mut pairs = Vec::new();
    let mut unary: Vec<(String, Vec<String>, usize)> = Vec::new();
    let mut index = None;
    let mut w = None;

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| ModelError::Syntax(line_no, "expected `key: values`".into()))?;
        let words: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        let key = key.trim();
        match key {
            "carrier" => {
                if words.is_empty() {
                    return Err(ModelError::EmptyCarrier);
                }
                names = Some(words);
            }
            "member" => {
                if words.len() != 2 {
                    return Err(ModelError::Syntax(line_no, "member takes two elements".into()));
                }
                pairs.push((words[0].clone(), words[1].clone(), line_no));
            }
            "index" | "w" => {
                let n = words
                    .first()
                    .filter(|_| words.len() == 1)
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| ModelError::Syntax(line_no, format!("{key} takes one integer")))?;
                if key == "index" {
                    index = Some(n);
                } else {
                    w = Some(n);
                }
            }
            _ => match key.strip_prefix("unary") {
                Some(name) if !name.trim().is_empty() => {
                    unary.push((name.trim().to_string(), words, line_no));
                }
                _ => return Err(ModelError::Syntax(line_no, format!("unknown key `{key}`"))),
            },
        }
    }

    let names = names.ok_or(ModelError::Missing("carrier"))?;
    let lookup = |s: &str, line: usize| {
        names
            .iter()
            .position(|n| n == s)
            .ok_or_else(|| ModelError::Syntax(line, format!("unknown element `{s}`")))
    };
    let mut resolved = Vec::new();
    for (a, b, line) in &pairs {
        resolved.push((lookup(a, *line)?, lookup(b, *line)?));
    }
    let mut structure = FinStructure::new(names.len(), &resolved)?;
    for (name, elems, line) in unary {
        let mut holds = vec![false; names.len()];
        for e in &elems {
            holds[lookup(e, line)?] = true;
        }
        structure = structure.with_unary(&name, holds)?;
    }
    structure.names = names;
    let index = FinIndex::new(
        index.ok_or(ModelError::Missing("index"))?,
        w.ok_or(ModelError::Missing("w"))?,
    )?;
    Ok(ModelSpec { structure, index })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let parsed = parse_model(
            "# a three-element model\ncarrier: a b c\nmember: a b\nmember: b c\nunary P: a c\nindex: 3\nw: 1\n",
        )
        .unwrap();
        let s = &parsed.structure;
        assert_eq!(s.size(), 3);
        assert!(s.mem(0, 1) && s.mem(1, 2) && !s.mem(0, 2));
        assert_eq!(s.unary_name(0), "P");
        assert!(s.unary(0, 0) && !s.unary(0, 1) && s.unary(0, 2));
        assert_eq!(parsed.index.size(), 3);
        assert_eq!(parsed.index.w(), 1);
        assert_eq!(s.name(2), "c");
    }

    #[test]
    fn reports_errors_with_lines() {
        assert!(matches!(
            parse_model("carrier: a\nmember: a z\nindex: 1\nw: 0"),
            Err(ModelError::Syntax(2, _))
        ));
        assert!(matches!(parse_model("carrier: a\nindex: 1"), Err(ModelError::Missing("w"))));
        assert!(matches!(parse_model("carrier: a\nindex: 2\nw: 5"), Err(ModelError::PointOutsideIndex { .. })));
        assert!(matches!(parse_model("bogus line"), Err(ModelError::Syntax(1, _))));
    }

    #[test]
    fn relation_bits() {
        let s = FinStructure::from_bits(2, 0b0010).unwrap();
        assert!(s.mem(0, 1));
        assert!(!s.mem(1, 0));
    }
}
