//! Test-only oracles, kept independent of the production implementations
//! they cross-check.

/// Rule-table interpretation of the published suffix-stripping algorithm,
/// including the reference implementation's three departures. Written
/// against the published rule list, structured around a consonant/vowel
/// form string rather than per-index classification.
pub mod porter_oracle {
    fn form(word: &str) -> String {
        let mut out = String::with_capacity(word.len());
        for (i, c) in word.chars().enumerate() {
            let vowel = match c {
                'a' | 'e' | 'i' | 'o' | 'u' => true,
                'y' => i > 0 && out.ends_with('c'),
                _ => false,
            };
            out.push(if vowel { 'v' } else { 'c' });
        }
        out
    }

    fn measure(word: &str) -> usize {
        let f = form(word);
        f.as_bytes().windows(2).filter(|w| w == b"vc").count()
    }

    fn has_vowel(word: &str) -> bool {
        form(word).contains('v')
    }

    fn ends_cvc(word: &str) -> bool {
        if !form(word).ends_with("cvc") {
            return false;
        }
        !matches!(word.chars().last(), Some('w') | Some('x') | Some('y'))
    }

    fn ends_double_consonant(word: &str) -> bool {
        let chars: Vec<char> = word.chars().collect();
        let n = chars.len();
        n >= 2 && chars[n - 1] == chars[n - 2] && form(word).ends_with('c')
    }

    #[derive(Clone, Copy)]
    enum Cond {
        Always,
        MeasureGt(usize),
        /// m > 1 and the stem ends s or t (the ION rule).
        MeasureGt1EndsSt,
        /// The LOGI rule measures the stem with the l attached.
        MeasureGt0WithL,
    }

    fn holds(cond: Cond, stem: &str, word: &str, suffix: &str) -> bool {
        match cond {
            Cond::Always => true,
            Cond::MeasureGt(n) => measure(stem) > n,
            Cond::MeasureGt1EndsSt => {
                measure(stem) > 1 && (stem.ends_with('s') || stem.ends_with('t'))
            }
            Cond::MeasureGt0WithL => {
                let keep = word.len() - suffix.len() + 1;
                measure(&word[..keep]) > 0
            }
        }
    }

    /// First rule whose suffix matches wins; a failed condition still stops
    /// the scan.
    fn apply(word: &str, rules: &[(&str, &str, Cond)]) -> String {
        for (suffix, replacement, cond) in rules {
            if let Some(stem) = word.strip_suffix(suffix) {
                if holds(*cond, stem, word, suffix) {
                    return format!("{stem}{replacement}");
                }
                return word.to_string();
            }
        }
        word.to_string()
    }

    fn step1a(word: &str) -> String {
        apply(
            word,
            &[
                ("sses", "ss", Cond::Always),
                ("ies", "i", Cond::Always),
                ("ss", "ss", Cond::Always),
                ("s", "", Cond::Always),
            ],
        )
    }

    fn step1b(word: &str) -> String {
        if let Some(stem) = word.strip_suffix("eed") {
            return if measure(stem) > 0 {
                format!("{stem}ee")
            } else {
                word.to_string()
            };
        }
        let stripped = ["ed", "ing"]
            .iter()
            .find_map(|suffix| word.strip_suffix(suffix).filter(|stem| has_vowel(stem)));
        let Some(stem) = stripped else {
            return word.to_string();
        };
        if stem.ends_with("at") || stem.ends_with("bl") || stem.ends_with("iz") {
            return format!("{stem}e");
        }
        if ends_double_consonant(stem) {
            return if stem.ends_with(['l', 's', 'z']) {
                stem.to_string()
            } else {
                stem[..stem.len() - 1].to_string()
            };
        }
        if measure(stem) == 1 && ends_cvc(stem) {
            return format!("{stem}e");
        }
        stem.to_string()
    }

    fn step1c(word: &str) -> String {
        match word.strip_suffix('y') {
            Some(stem) if has_vowel(stem) => format!("{stem}i"),
            _ => word.to_string(),
        }
    }

    fn step2(word: &str) -> String {
        apply(
            word,
            &[
                ("ational", "ate", Cond::MeasureGt(0)),
                ("tional", "tion", Cond::MeasureGt(0)),
                ("enci", "ence", Cond::MeasureGt(0)),
                ("anci", "ance", Cond::MeasureGt(0)),
                ("izer", "ize", Cond::MeasureGt(0)),
                ("bli", "ble", Cond::MeasureGt(0)),
                ("alli", "al", Cond::MeasureGt(0)),
                ("entli", "ent", Cond::MeasureGt(0)),
                ("eli", "e", Cond::MeasureGt(0)),
                ("ousli", "ous", Cond::MeasureGt(0)),
                ("ization", "ize", Cond::MeasureGt(0)),
                ("ation", "ate", Cond::MeasureGt(0)),
                ("ator", "ate", Cond::MeasureGt(0)),
                ("alism", "al", Cond::MeasureGt(0)),
                ("iveness", "ive", Cond::MeasureGt(0)),
                ("fulness", "ful", Cond::MeasureGt(0)),
                ("ousness", "ous", Cond::MeasureGt(0)),
                ("aliti", "al", Cond::MeasureGt(0)),
                ("iviti", "ive", Cond::MeasureGt(0)),
                ("biliti", "ble", Cond::MeasureGt(0)),
                ("logi", "log", Cond::MeasureGt0WithL),
            ],
        )
    }

    fn step3(word: &str) -> String {
        apply(
            word,
            &[
                ("icate", "ic", Cond::MeasureGt(0)),
                ("ative", "", Cond::MeasureGt(0)),
                ("alize", "al", Cond::MeasureGt(0)),
                ("iciti", "ic", Cond::MeasureGt(0)),
                ("ical", "ic", Cond::MeasureGt(0)),
                ("ful", "", Cond::MeasureGt(0)),
                ("ness", "", Cond::MeasureGt(0)),
            ],
        )
    }

    fn step4(word: &str) -> String {
        apply(
            word,
            &[
                ("al", "", Cond::MeasureGt(1)),
                ("ance", "", Cond::MeasureGt(1)),
                ("ence", "", Cond::MeasureGt(1)),
                ("er", "", Cond::MeasureGt(1)),
                ("ic", "", Cond::MeasureGt(1)),
                ("able", "", Cond::MeasureGt(1)),
                ("ible", "", Cond::MeasureGt(1)),
                ("ant", "", Cond::MeasureGt(1)),
                ("ement", "", Cond::MeasureGt(1)),
                ("ment", "", Cond::MeasureGt(1)),
                ("ent", "", Cond::MeasureGt(1)),
                ("ion", "", Cond::MeasureGt1EndsSt),
                ("ou", "", Cond::MeasureGt(1)),
                ("ism", "", Cond::MeasureGt(1)),
                ("ate", "", Cond::MeasureGt(1)),
                ("iti", "", Cond::MeasureGt(1)),
                ("ous", "", Cond::MeasureGt(1)),
                ("ive", "", Cond::MeasureGt(1)),
                ("ize", "", Cond::MeasureGt(1)),
            ],
        )
    }

    fn step5a(word: &str) -> String {
        if let Some(stem) = word.strip_suffix('e') {
            let m = measure(stem);
            if m > 1 || (m == 1 && !ends_cvc(stem)) {
                return stem.to_string();
            }
        }
        word.to_string()
    }

    fn step5b(word: &str) -> String {
        if measure(word) > 1 && word.ends_with("ll") {
            return word[..word.len() - 1].to_string();
        }
        word.to_string()
    }

    pub fn stem(word: &str) -> String {
        if word.chars().count() <= 2 {
            return word.to_string();
        }
        let mut w = step1a(word);
        w = step1b(&w);
        w = step1c(&w);
        w = step2(&w);
        w = step3(&w);
        w = step4(&w);
        w = step5a(&w);
        step5b(&w)
    }
}

/// Transliteration of the reference METEOR procedure: enumerated token
/// lists, reverse-scan pop matching, exact stage then stem stage, chunk
/// count over hyp-sorted matches, harmonic f-mean with the fragmentation
/// penalty. Mirrors the reference's list semantics one statement at a time.
pub mod meteor_oracle {
    pub struct OracleBreakdown {
        pub matches: usize,
        pub chunks: usize,
        pub score: f64,
    }

    fn match_enums(
        hyp: &mut Vec<(usize, String)>,
        reference: &mut Vec<(usize, String)>,
    ) -> Vec<(usize, usize)> {
        let mut word_match = Vec::new();
        // for i in range(len(hyp))[::-1]
        let mut i = hyp.len() as isize - 1;
        while i >= 0 {
            // for j in range(len(reference))[::-1]
            let mut j = reference.len() as isize - 1;
            while j >= 0 {
                if hyp[i as usize].1 == reference[j as usize].1 {
                    word_match.push((hyp[i as usize].0, reference[j as usize].0));
                    hyp.remove(i as usize);
                    reference.remove(j as usize);
                    break;
                }
                j -= 1;
            }
            i -= 1;
        }
        word_match
    }

    fn count_chunks(matches: &[(usize, usize)]) -> usize {
        let mut i = 0;
        let mut chunks = 1;
        while i + 1 < matches.len() {
            if !(matches[i + 1].0 == matches[i].0 + 1 && matches[i + 1].1 == matches[i].1 + 1) {
                chunks += 1;
            }
            i += 1;
        }
        chunks
    }

    /// Exact stage, then stem stage over the leftovers, using the supplied
    /// stemmer; alpha/beta/gamma as in the reference defaults.
    pub fn score(
        hyp_tokens: &[String],
        ref_tokens: &[String],
        alpha: f64,
        beta: f64,
        gamma: f64,
        stemmer: impl Fn(&str) -> String,
    ) -> OracleBreakdown {
        let mut enum_hyp: Vec<(usize, String)> = hyp_tokens.iter().cloned().enumerate().collect();
        let mut enum_ref: Vec<(usize, String)> = ref_tokens.iter().cloned().enumerate().collect();
        let translation_length = enum_hyp.len();
        let reference_length = enum_ref.len();

        let mut matches = match_enums(&mut enum_hyp, &mut enum_ref);

        let mut stemmed_hyp: Vec<(usize, String)> =
            enum_hyp.iter().map(|(i, w)| (*i, stemmer(w))).collect();
        let mut stemmed_ref: Vec<(usize, String)> =
            enum_ref.iter().map(|(i, w)| (*i, stemmer(w))).collect();
        matches.extend(match_enums(&mut stemmed_hyp, &mut stemmed_ref));

        matches.sort_by_key(|pair| pair.0);
        let matches_count = matches.len();
        if matches_count == 0 || translation_length == 0 || reference_length == 0 {
            return OracleBreakdown {
                matches: 0,
                chunks: 0,
                score: 0.0,
            };
        }
        let precision = matches_count as f64 / translation_length as f64;
        let recall = matches_count as f64 / reference_length as f64;
        let fmean = (precision * recall) / (alpha * precision + (1.0 - alpha) * recall);
        let chunk_count = count_chunks(&matches);
        let frag_frac = chunk_count as f64 / matches_count as f64;
        let penalty = gamma * frag_frac.powf(beta);
        OracleBreakdown {
            matches: matches_count,
            chunks: chunk_count,
            score: (1.0 - penalty) * fmean,
        }
    }
}

/// Deterministic generator for fuzz-style checks without external crates.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
