use std::collections::HashSet;
use std::path::Path;

use super::NormalizeError;

const BUNDLED_STOPWORDS: &str = include_str!("../../resources/stopwords.txt");
const BUNDLED_LEMMA_RULES: &str = include_str!("../../resources/lemma_rules.tsv");

/// Shortest word a rewriting rule may produce.
const MIN_RESULT_CHARS: usize = 3;

/// One `<suffix> -> <replacement>` row of the lemma table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixRule {
    pub suffix: String,
    pub replacement: String,
}

impl SuffixRule {
    fn protects(&self) -> bool {
        self.suffix == self.replacement
    }
}

/// Ordered suffix-rewrite lemmatizer.
///
/// Rules are tried top to bottom and the first matching row wins. Rewriting
/// repeats until no rule changes the word, so lemmas are fixed points of the
/// table. Every rewriting row must shorten the word, which bounds the loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemmatizer {
    rules: Vec<SuffixRule>,
}

impl Lemmatizer {
    pub fn new(rules: Vec<SuffixRule>) -> Result<Self, NormalizeError> {
        for r in &rules {
            if r.suffix.is_empty() {
                return Err(NormalizeError::BadRules("empty suffix".into()));
            }
            if !r.protects() && r.replacement.chars().count() >= r.suffix.chars().count() {
                return Err(NormalizeError::BadRules(format!(
                    "rule {:?} -> {:?} does not shorten the word",
                    r.suffix, r.replacement
                )));
            }
        }
        Ok(Self { rules })
    }

    /// Parses `lemma_rules.tsv`: `<suffix>\t<replacement>` rows, `#` comments.
    pub fn parse(text: &str) -> Result<Self, NormalizeError> {
        let mut rules = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (suffix, replacement) = line.split_once('\t').ok_or_else(|| {
                NormalizeError::BadRules(format!("line {}: expected <suffix>\\t<replacement>", lineno + 1))
            })?;
            rules.push(SuffixRule {
                suffix: suffix.trim().to_lowercase(),
                replacement: replacement.trim().to_lowercase(),
            });
        }
        Self::new(rules)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEMMA_RULES).expect("bundled lemma rules are valid")
    }

    pub fn rules(&self) -> &[SuffixRule] {
        &self.rules
    }

    fn apply_once(&self, word: &str) -> Option<String> {
        let len = word.chars().count();
        for rule in &self.rules {
            if !word.ends_with(rule.suffix.as_str()) {
                continue;
            }
            if rule.protects() {
                return None;
            }
            if len - rule.suffix.chars().count() + rule.replacement.chars().count() < MIN_RESULT_CHARS {
                continue;
            }
            let stem = &word[..word.len() - rule.suffix.len()];
            return Some(format!("{stem}{}", rule.replacement));
        }
        None
    }

    pub fn lemmatize(&self, word: &str) -> String {
        let mut current = word.to_string();
        while let Some(next) = self.apply_once(&current) {
            current = next;
        }
        current
    }
}

/// Token cleaning settings: stopwords, lemma rules, and a length floor.
#[derive(Debug, Clone)]
pub struct CleanConfig {
    pub stopwords: HashSet<String>,
    pub lemmatizer: Lemmatizer,
    pub min_token_length: usize,
}

impl CleanConfig {
    pub fn bundled() -> Self {
        Self {
            stopwords: parse_stopwords(BUNDLED_STOPWORDS).expect("bundled stopwords are valid"),
            lemmatizer: Lemmatizer::bundled(),
            min_token_length: 2,
        }
    }

    /// Bundled defaults, with either resource replaced by a file on disk.
    pub fn load(stopwords: Option<&Path>, lemma_rules: Option<&Path>) -> Result<Self, NormalizeError> {
        let mut cfg = Self::bundled();
        if let Some(p) = stopwords {
            cfg.stopwords = parse_stopwords(&read(p)?)?;
        }
        if let Some(p) = lemma_rules {
            cfg.lemmatizer = Lemmatizer::parse(&read(p)?)?;
        }
        Ok(cfg)
    }

    /// Cleans one token; `None` when it is dropped.
    pub fn clean_token(&self, raw: &str) -> Option<String> {
        let stripped: String = raw.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect();
        if stripped.is_empty() || !stripped.chars().all(char::is_alphabetic) {
            return None;
        }
        if self.stopwords.contains(&stripped) {
            return None;
        }
        let lemma = self.lemmatizer.lemmatize(&stripped);
        if lemma.chars().count() < self.min_token_length || self.stopwords.contains(&lemma) {
            return None;
        }
        Some(lemma)
    }

    pub fn clean_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<String> {
        tokens.iter().filter_map(|t| self.clean_token(t.as_ref())).collect()
    }
}

fn read(p: &Path) -> Result<String, NormalizeError> {
    std::fs::read_to_string(p).map_err(|e| NormalizeError::Io(format!("{}: {e}", p.display())))
}

/// Parses `stopwords.txt`: one lowercase token per line, `#` comments.
pub fn parse_stopwords(text: &str) -> Result<HashSet<String>, NormalizeError> {
    let mut out = HashSet::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.chars().any(|c| c.is_whitespace() || c.is_uppercase()) {
            return Err(NormalizeError::BadStopwords(format!("{line:?} is not a lowercase token")));
        }
        out.insert(line.to_string());
    }
    Ok(out)
}
