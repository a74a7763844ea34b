//! Part-of-speech tagging interface for the content-words baseline, plus the
//! shipped rule-and-lexicon tagger. The built-in tagger is an approximation:
//! a closed-class word list, a small verb lexicon, and suffix rules, with
//! nouns as the open-class default. External taggers plug in via
//! [`FileTagger`].

use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PosTag {
    Noun,
    Verb,
    Other,
}

pub trait PosTagger: Send + Sync {
    fn tag(&self, token: &str) -> PosTag;
}

const CLOSED_CLASS: &str = "a an the this that these those some any no every each either neither \
    and or but nor so yet because although though while if unless until since when whenever \
    where wherever whether after before as than \
    i you he she it we they me him her us them my your his its our their mine yours hers ours \
    theirs myself yourself himself herself itself ourselves themselves who whom whose which what \
    of in on at by for with about against between into through during above below to from up \
    down out off over under again further then once here there all both few more most other \
    such only own same too very just not now also however therefore moreover meanwhile \
    instead otherwise anyway perhaps maybe quite rather almost always never often sometimes \
    soon already still yes please";

const VERBS: &str = "be is am are was were been being become became becomes do does did done \
    doing have has had having go goes went gone going say says said make makes made take takes \
    took taken get gets got gotten see sees saw seen come comes came know knows knew known give \
    gives gave given find finds found tell tells told show shows showed shown live lives lived \
    buy buys bought sell sells sold pay pays paid earn earns earned kill kills killed eat eats \
    ate eaten drink drinks drank cause causes caused protect protects protected claim claimed \
    sit sits sat run runs ran stand stood think thinks thought believe believes believed write \
    writes wrote written read reads post posts posted share shares shared spread spreads appoint \
    appoints appointed own owns owned cost costs win wins won lose loses lost rise rose fall \
    fell grow grew die dies died help helps helped want wants wanted use uses used need needs \
    needed work works worked call calls called try tries tried ask asks asked feel felt leave \
    left put puts set sets keep keeps kept let lets begin began begins seem seems seemed talk \
    talks talked turn turns turned start starts started play plays played move moves moved like \
    likes liked look looks looked chase chases chased can could will would shall should may \
    might must";

const NOUN_SUFFIXES: [&str; 14] = [
    "tion", "sion", "ment", "ness", "ance", "ence", "ity", "ship", "hood", "ism", "ist", "ology",
    "graphy", "cracy",
];

const VERB_SUFFIXES: [&str; 5] = ["ize", "ise", "ify", "ated", "izing"];

/// Suffix rules plus lexicons; defaults unknown open-class words to noun.
pub struct RuleTagger {
    closed: HashMap<String, ()>,
    verbs: HashMap<String, ()>,
}

impl Default for RuleTagger {
    fn default() -> Self {
        let set = |words: &str| {
            words
                .split_whitespace()
                .map(|w| (w.to_string(), ()))
                .collect()
        };
        Self {
            closed: set(CLOSED_CLASS),
            verbs: set(VERBS),
        }
    }
}

impl PosTagger for RuleTagger {
    fn tag(&self, token: &str) -> PosTag {
        let lower = token.to_lowercase();
        if lower.is_empty() {
            return PosTag::Other;
        }
        if self.closed.contains_key(&lower) {
            return PosTag::Other;
        }
        if self.verbs.contains_key(&lower) {
            return PosTag::Verb;
        }
        if NOUN_SUFFIXES.iter().any(|s| lower.ends_with(s)) {
            return PosTag::Noun;
        }
        if VERB_SUFFIXES.iter().any(|s| lower.ends_with(s)) {
            return PosTag::Verb;
        }
        if lower.len() > 4 && (lower.ends_with("ing") || lower.ends_with("ed")) {
            return PosTag::Verb;
        }
        PosTag::Noun
    }
}

#[derive(Debug, thiserror::Error)]
#[error("tagger unavailable: {0}")]
pub struct TaggerUnavailable(pub String);

/// Word -> tag lookup loaded from TSV lines `word<TAB>noun|verb|other`.
/// Unknown words tag as Other.
pub struct FileTagger {
    tags: HashMap<String, PosTag>,
}

impl FileTagger {
    pub fn load(path: &Path) -> Result<Self, TaggerUnavailable> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TaggerUnavailable(format!("{}: {e}", path.display())))?;
        let mut tags = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((word, tag)) = line.split_once('\t') else {
                return Err(TaggerUnavailable(format!(
                    "{}: line {} is not word<TAB>tag",
                    path.display(),
                    idx + 1
                )));
            };
            let tag = match tag.trim() {
                "noun" => PosTag::Noun,
                "verb" => PosTag::Verb,
                "other" => PosTag::Other,
                bad => {
                    return Err(TaggerUnavailable(format!(
                        "{}: unknown tag {bad:?} on line {}",
                        path.display(),
                        idx + 1
                    )))
                }
            };
            tags.insert(word.trim().to_lowercase(), tag);
        }
        Ok(Self { tags })
    }
}

impl PosTagger for FileTagger {
    fn tag(&self, token: &str) -> PosTag {
        self.tags
            .get(&token.to_lowercase())
            .copied()
            .unwrap_or(PosTag::Other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_tagger_basics() {
        let tagger = RuleTagger::default();
        assert_eq!(tagger.tag("the"), PosTag::Other);
        assert_eq!(tagger.tag("sat"), PosTag::Verb);
        assert_eq!(tagger.tag("cat"), PosTag::Noun);
        assert_eq!(tagger.tag("running"), PosTag::Verb);
        assert_eq!(tagger.tag("commission"), PosTag::Noun);
        assert_eq!(tagger.tag("senator"), PosTag::Noun);
    }

    #[test]
    fn file_tagger_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tags.tsv");
        std::fs::write(&path, "cat\tnoun\nsat\tverb\nthe\tother\n").unwrap();
        let tagger = FileTagger::load(&path).unwrap();
        assert_eq!(tagger.tag("cat"), PosTag::Noun);
        assert_eq!(tagger.tag("SAT"), PosTag::Verb);
        assert_eq!(tagger.tag("unknown"), PosTag::Other);
    }

    #[test]
    fn file_tagger_missing_file() {
        assert!(FileTagger::load(Path::new("/nonexistent/tags.tsv")).is_err());
    }
}
