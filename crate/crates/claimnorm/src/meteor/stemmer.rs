//! Porter suffix-stripping stemmer.
//!
//! Implements the published algorithm (steps 1a through 5b) including the
//! three departures the author's reference implementation made canonical:
//! strings of one or two letters are left alone, `(m>0) BLI -> BLE` replaces
//! `(m>0) ABLI -> ABLE`, and the extra rule `(m>0) LOGI -> LOG`. This is the
//! behavior the published test vocabulary reflects.

const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];

fn is_consonant(w: &[char], i: usize) -> bool {
    let c = w[i];
    if VOWELS.contains(&c) {
        return false;
    }
    if c == 'y' {
        // y is a vowel when it follows a consonant
        return if i == 0 {
            true
        } else {
            !is_consonant(w, i - 1)
        };
    }
    true
}

/// Number of vowel-consonant sequences: the m in C?(VC)^m V?.
fn measure(w: &[char]) -> usize {
    let mut m = 0;
    let mut prev_vowel = false;
    for i in 0..w.len() {
        let cons = is_consonant(w, i);
        if prev_vowel && cons {
            m += 1;
        }
        prev_vowel = !cons;
    }
    m
}

fn contains_vowel(w: &[char]) -> bool {
    (0..w.len()).any(|i| !is_consonant(w, i))
}

fn ends_double_consonant(w: &[char]) -> bool {
    let n = w.len();
    n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1)
}

/// *o: stem ends consonant-vowel-consonant where the final consonant
/// is not w, x or y.
fn ends_cvc(w: &[char]) -> bool {
    let n = w.len();
    n >= 3
        && is_consonant(w, n - 3)
        && !is_consonant(w, n - 2)
        && is_consonant(w, n - 1)
        && !matches!(w[n - 1], 'w' | 'x' | 'y')
}

fn ends(w: &[char], suffix: &str) -> bool {
    let s: Vec<char> = suffix.chars().collect();
    w.len() >= s.len() && w[w.len() - s.len()..] == s[..]
}

/// Replace `suffix` (which must match) with `replacement` when the measure of
/// the remaining stem exceeds `min_measure`. Returns true when the suffix
/// matched at all, so callers can stop scanning further rules.
fn try_rule(w: &mut Vec<char>, suffix: &str, replacement: &str, min_measure: usize) -> bool {
    if !ends(w, suffix) {
        return false;
    }
    let stem_len = w.len() - suffix.chars().count();
    if measure(&w[..stem_len]) > min_measure {
        w.truncate(stem_len);
        w.extend(replacement.chars());
    }
    true
}

fn step1a(w: &mut Vec<char>) {
    if ends(w, "sses") || ends(w, "ies") {
        let n = w.len();
        w.truncate(n - 2);
    } else if !ends(w, "ss") && ends(w, "s") {
        w.pop();
    }
}

fn step1b(w: &mut Vec<char>) {
    if ends(w, "eed") {
        if measure(&w[..w.len() - 3]) > 0 {
            w.pop();
        }
        return;
    }
    let stripped = if ends(w, "ed") && contains_vowel(&w[..w.len() - 2]) {
        2
    } else if ends(w, "ing") && contains_vowel(&w[..w.len() - 3]) {
        3
    } else {
        return;
    };
    w.truncate(w.len() - stripped);

    if ends(w, "at") || ends(w, "bl") || ends(w, "iz") {
        w.push('e');
    } else if ends_double_consonant(w) {
        if !matches!(w[w.len() - 1], 'l' | 's' | 'z') {
            w.pop();
        }
    } else if measure(w) == 1 && ends_cvc(w) {
        w.push('e');
    }
}

fn step1c(w: &mut [char]) {
    if ends(w, "y") && contains_vowel(&w[..w.len() - 1]) {
        let n = w.len();
        w[n - 1] = 'i';
    }
}

fn step2(w: &mut Vec<char>) {
    const RULES: [(&str, &str); 20] = [
        ("ational", "ate"),
        ("tional", "tion"),
        ("enci", "ence"),
        ("anci", "ance"),
        ("izer", "ize"),
        ("bli", "ble"),
        ("alli", "al"),
        ("entli", "ent"),
        ("eli", "e"),
        ("ousli", "ous"),
        ("ization", "ize"),
        ("ation", "ate"),
        ("ator", "ate"),
        ("alism", "al"),
        ("iveness", "ive"),
        ("fulness", "ful"),
        ("ousness", "ous"),
        ("aliti", "al"),
        ("iviti", "ive"),
        ("biliti", "ble"),
    ];
    for (suffix, replacement) in RULES {
        if try_rule(w, suffix, replacement, 0) {
            return;
        }
    }
    // The l of LOGI -> LOG stays with the stem for the measure test.
    if ends(w, "logi") && measure(&w[..w.len() - 3]) > 0 {
        w.pop();
    }
}

fn step3(w: &mut Vec<char>) {
    const RULES: [(&str, &str); 7] = [
        ("icate", "ic"),
        ("ative", ""),
        ("alize", "al"),
        ("iciti", "ic"),
        ("ical", "ic"),
        ("ful", ""),
        ("ness", ""),
    ];
    for (suffix, replacement) in RULES {
        if try_rule(w, suffix, replacement, 0) {
            return;
        }
    }
}

fn step4(w: &mut Vec<char>) {
    const RULES: [&str; 18] = [
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent", "ou",
        "ism", "ate", "iti", "ous", "ive", "ize",
    ];
    // "ion" needs its own condition and sits between "ent" and "ou".
    for (idx, suffix) in RULES.iter().enumerate() {
        if idx == 11 && ends(w, "ion") {
            let stem_len = w.len() - 3;
            if measure(&w[..stem_len]) > 1 && matches!(w[stem_len - 1], 's' | 't') {
                w.truncate(stem_len);
            }
            return;
        }
        if try_rule(w, suffix, "", 1) {
            return;
        }
    }
}

fn step5a(w: &mut Vec<char>) {
    if !ends(w, "e") {
        return;
    }
    let stem = &w[..w.len() - 1];
    let m = measure(stem);
    if m > 1 || (m == 1 && !ends_cvc(stem)) {
        w.pop();
    }
}

fn step5b(w: &mut Vec<char>) {
    if measure(w) > 1 && ends_double_consonant(w) && ends(w, "l") {
        w.pop();
    }
}

/// Stem one lowercase word.
pub fn porter_stem(word: &str) -> String {
    let mut w: Vec<char> = word.chars().collect();
    if w.len() <= 2 {
        return word.to_string();
    }
    step1a(&mut w);
    step1b(&mut w);
    step1c(&mut w);
    step2(&mut w);
    step3(&mut w);
    step4(&mut w);
    step5a(&mut w);
    step5b(&mut w);
    w.into_iter().collect()
}
