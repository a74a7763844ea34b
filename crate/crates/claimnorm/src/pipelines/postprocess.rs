//! Claim post-processing. Models routinely ignore "output only the claim"
//! directives, so responses are cleaned with a fixed rule set before scoring.

const LEADING_LABELS: [&str; 5] = [
    "the main claim is",
    "the essential primary claim is",
    "**normalized claim:**",
    "normalized claim:",
    "extracted claim:",
];

const WRAPPERS: [(&str, &str); 8] = [
    ("**", "**"),
    ("*", "*"),
    ("_", "_"),
    ("\"", "\""),
    ("'", "'"),
    ("`", "`"),
    ("\u{201c}", "\u{201d}"),
    ("\u{2018}", "\u{2019}"),
];

/// Cut to the text after the final "Normalized claim:" marker, consuming a
/// closing "**" when the marker was bold.
fn cut_at_final_marker(text: &str) -> &str {
    let lower = text.to_lowercase();
    let marker = "normalized claim:";
    let Some(pos) = lower.rfind(marker) else {
        return text;
    };
    let mut rest = &text[pos + marker.len()..];
    rest = rest.trim_start();
    if let Some(stripped) = rest.strip_prefix("**") {
        rest = stripped.trim_start();
    }
    rest
}

fn strip_leading_label(text: &str) -> &str {
    let lower = text.to_lowercase();
    for label in LEADING_LABELS {
        if lower.starts_with(label) {
            return text[label.len()..].trim_start();
        }
    }
    text
}

fn strip_wrappers(text: &str) -> &str {
    let mut current = text.trim();
    loop {
        let mut changed = false;
        for (open, close) in WRAPPERS {
            if current.len() > open.len() + close.len()
                && current.starts_with(open)
                && current.ends_with(close)
            {
                current = current[open.len()..current.len() - close.len()].trim();
                changed = true;
            }
        }
        if !changed {
            return current;
        }
    }
}

/// Clean one raw model response into a claim string. Always returns a string,
/// possibly empty.
pub fn postprocess_claim(raw: &str) -> String {
    let mut text = cut_at_final_marker(raw).trim();
    text = strip_leading_label(text);
    if let Some(rest) = text
        .strip_prefix("that ")
        .or_else(|| text.strip_prefix("That "))
    {
        text = rest;
    }
    text = strip_wrappers(text);
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
