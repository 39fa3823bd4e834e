//! Hashtag normalization: canonical token form, user-supplied translation,
//! and folding of plural forms and near-duplicate spellings.
//!
//! Folding runs in rounds until the vocabulary is a fixed point, so applying
//! the normalizer to its own output changes nothing.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::corpus::PostCollection;
use crate::error::{Result, TagnetError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalizationRules {
    /// User-supplied raw -> canonical pairs (e.g. local names to English).
    pub translation_map: BTreeMap<String, String>,
    pub variant_merge_enabled: bool,
    /// Levenshtein threshold for variant merging, 0..=2.
    pub edit_distance_threshold: u32,
    pub plural_folding_enabled: bool,
    /// A token only attracts edit-distance folds if at least this frequent.
    pub min_frequency_for_canonical: u64,
}

impl Default for NormalizationRules {
    fn default() -> Self {
        NormalizationRules {
            translation_map: BTreeMap::new(),
            variant_merge_enabled: true,
            edit_distance_threshold: 1,
            plural_folding_enabled: true,
            min_frequency_for_canonical: 2,
        }
    }
}

impl NormalizationRules {
    pub fn validate(&self) -> Result<()> {
        if self.edit_distance_threshold > 2 {
            return Err(TagnetError::InvalidConfig(format!(
                "edit_distance_threshold must be 0, 1 or 2 (got {})",
                self.edit_distance_threshold
            )));
        }
        for (raw, target) in &self.translation_map {
            let canon = canonical_form(target)?;
            if canon != *target {
                return Err(TagnetError::InvalidConfig(format!(
                    "translation target {target:?} (for {raw:?}) is not in canonical form"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    CaseFold,
    Translation,
    Plural,
    EditDistance,
}

/// Fully resolved raw -> canonical mapping. Tokens absent from the map are
/// their own canonical form; no chains of length > 1 exist.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VariantMap {
    pub entries: BTreeMap<String, (String, Provenance)>,
}

impl VariantMap {
    pub fn apply<'a>(&'a self, token: &'a str) -> &'a str {
        match self.entries.get(token) {
            Some((canonical, _)) => canonical,
            None => token,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct NormalizationReport {
    pub vocabulary_before: usize,
    pub vocabulary_after: usize,
    pub case_folded: usize,
    pub translated: usize,
    pub plural_folded: usize,
    pub edit_distance_folded: usize,
}

/// Canonical token form: strip leading `#`, Unicode NFC, lowercase, drop
/// punctuation. Rejects tokens that are empty afterwards.
pub fn canonical_form(raw: &str) -> Result<String> {
    let stripped = raw.trim_start_matches('#');
    let canon: String = stripped
        .nfc()
        .collect::<String>()
        .to_lowercase()
        .chars()
        .filter(|c| c.is_alphanumeric())
        .collect();
    if canon.is_empty() {
        return Err(TagnetError::EmptyToken { raw: raw.to_owned() });
    }
    Ok(canon)
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Singular candidate for a plural-looking token: drop a trailing "s", or
/// failing that "es"; the result must keep at least 4 characters.
fn singular_candidates(token: &str) -> Vec<&str> {
    let mut out = Vec::new();
    if let Some(s) = token.strip_suffix('s') {
        if s.chars().count() >= 4 {
            out.push(s);
        }
    }
    if let Some(s) = token.strip_suffix("es") {
        if s.chars().count() >= 4 {
            out.push(s);
        }
    }
    out
}

/// One folding round over a frequency vocabulary. Returns source -> (target,
/// provenance) proposals; targets are strictly preferred by frequency with
/// lexicographic tie-breaks, so proposal chains never cycle.
fn fold_round(
    vocab: &BTreeMap<String, u64>,
    rules: &NormalizationRules,
) -> BTreeMap<String, (String, Provenance)> {
    let mut proposals: BTreeMap<String, (String, Provenance)> = BTreeMap::new();

    if rules.plural_folding_enabled {
        for (token, &freq) in vocab {
            for singular in singular_candidates(token) {
                if let Some(&singular_freq) = vocab.get(singular) {
                    // The less frequent of the pair folds into the other;
                    // on a tie the plural folds into the singular.
                    if singular_freq >= freq {
                        proposals.insert(token.clone(), (singular.to_owned(), Provenance::Plural));
                    } else {
                        proposals.insert(singular.to_owned(), (token.clone(), Provenance::Plural));
                    }
                    break;
                }
            }
        }
    }

    if rules.variant_merge_enabled && rules.edit_distance_threshold > 0 {
        let thr = rules.edit_distance_threshold as usize;
        for (token, &freq) in vocab {
            if proposals.contains_key(token) {
                continue;
            }
            let mut best: Option<(&str, u64)> = None;
            for (cand, &cand_freq) in vocab {
                if cand_freq <= freq || cand_freq < rules.min_frequency_for_canonical {
                    continue;
                }
                let len_diff = token.chars().count().abs_diff(cand.chars().count());
                if len_diff > thr || levenshtein(token, cand) > thr {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((best_tok, best_freq)) => {
                        cand_freq > best_freq || (cand_freq == best_freq && cand.as_str() < best_tok)
                    }
                };
                if better {
                    best = Some((cand, cand_freq));
                }
            }
            if let Some((target, _)) = best {
                proposals.insert(token.clone(), (target.to_owned(), Provenance::EditDistance));
            }
        }
    }

    // Resolve chains within the round (a -> b, b -> c becomes a -> c,
    // keeping a's provenance).
    let flat: BTreeMap<String, (String, Provenance)> = proposals
        .iter()
        .map(|(src, (tgt, prov))| {
            let mut cur = tgt.clone();
            let mut guard = 0;
            while let Some((next, _)) = proposals.get(&cur) {
                cur = next.clone();
                guard += 1;
                assert!(guard <= proposals.len(), "fold proposals formed a cycle");
            }
            (src.clone(), (cur, *prov))
        })
        .collect();
    flat
}

/// Resolve the translation map to single-step form; cycles are rejected.
fn resolved_translations(rules: &NormalizationRules) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for raw in rules.translation_map.keys() {
        let mut cur = raw.clone();
        let mut seen = HashSet::new();
        while let Some(next) = rules.translation_map.get(&cur) {
            if !seen.insert(cur.clone()) {
                return Err(TagnetError::InvalidConfig(format!(
                    "translation map contains a cycle through {raw:?}"
                )));
            }
            cur = next.clone();
        }
        if cur != *raw {
            out.insert(raw.clone(), cur);
        }
    }
    Ok(out)
}

fn merge_vocab(
    vocab: &BTreeMap<String, u64>,
    step: &BTreeMap<String, (String, Provenance)>,
) -> BTreeMap<String, u64> {
    let mut merged: BTreeMap<String, u64> = BTreeMap::new();
    for (token, &freq) in vocab {
        let target = match step.get(token) {
            Some((t, _)) => t.clone(),
            None => token.clone(),
        };
        *merged.entry(target).or_insert(0) += freq;
    }
    merged
}

/// Compose `step` onto an accumulated raw -> canonical map.
fn compose(
    composed: &mut BTreeMap<String, (String, Provenance)>,
    step: &BTreeMap<String, (String, Provenance)>,
    vocab_tokens: impl Iterator<Item = String>,
) {
    for target in composed.values_mut() {
        if let Some((next, _)) = step.get(&target.0) {
            target.0 = next.clone();
        }
    }
    for token in vocab_tokens {
        if let Some((tgt, prov)) = step.get(&token) {
            composed.entry(token).or_insert_with(|| (tgt.clone(), *prov));
        }
    }
}

/// Build a fully resolved variant map from a token frequency vocabulary.
/// Translation entries apply first; plural and edit-distance folds then run
/// round by round on the merged vocabulary until nothing folds.
pub fn build_variant_map(
    vocabulary: &BTreeMap<String, u64>,
    rules: &NormalizationRules,
) -> Result<VariantMap> {
    if vocabulary.is_empty() {
        return Err(TagnetError::InvalidInput("vocabulary is empty".into()));
    }
    rules.validate()?;

    let mut composed: BTreeMap<String, (String, Provenance)> = BTreeMap::new();
    let translations = resolved_translations(rules)?;
    let translation_step: BTreeMap<String, (String, Provenance)> = translations
        .iter()
        .filter(|(raw, _)| vocabulary.contains_key(*raw))
        .map(|(raw, tgt)| (raw.clone(), (tgt.clone(), Provenance::Translation)))
        .collect();
    let mut vocab = merge_vocab(vocabulary, &translation_step);
    compose(&mut composed, &translation_step, vocabulary.keys().cloned());

    loop {
        let step = fold_round(&vocab, rules);
        if step.is_empty() {
            break;
        }
        compose(&mut composed, &step, vocab.keys().cloned());
        vocab = merge_vocab(&vocab, &step);
    }

    composed.retain(|raw, (canonical, _)| raw != canonical);
    Ok(VariantMap { entries: composed })
}

/// Canonicalize every hashtag in the corpus and fold variants.
/// Within a post, hashtags that collapse to the same token are deduplicated.
pub fn normalize_corpus(
    collection: &PostCollection,
    rules: &NormalizationRules,
) -> Result<(PostCollection, NormalizationReport, VariantMap)> {
    rules.validate()?;
    let mut report = NormalizationReport::default();

    let mut raw_vocab: HashSet<String> = HashSet::new();
    let mut case_folded: HashSet<String> = HashSet::new();
    let mut posts = collection.posts.clone();
    for post in &mut posts {
        let mut tags = Vec::with_capacity(post.hashtags.len());
        for raw in &post.hashtags {
            raw_vocab.insert(raw.clone());
            // Tokens that are pure punctuation vanish here.
            if let Ok(canon) = canonical_form(raw) {
                if canon != *raw {
                    case_folded.insert(raw.clone());
                }
                tags.push(canon);
            }
        }
        post.hashtags = tags;
    }
    report.vocabulary_before = raw_vocab.len();
    report.case_folded = case_folded.len();

    // Post-level frequency: number of posts whose tag set contains the token.
    let post_freqs = |posts: &[crate::corpus::Post]| -> BTreeMap<String, u64> {
        let mut vocab = BTreeMap::new();
        for post in posts {
            let unique: HashSet<&String> = post.hashtags.iter().collect();
            for tag in unique {
                *vocab.entry(tag.clone()).or_insert(0) += 1;
            }
        }
        vocab
    };

    let mut composed: BTreeMap<String, (String, Provenance)> = BTreeMap::new();
    let translations = resolved_translations(rules)?;
    let mut vocab = post_freqs(&posts);
    let translation_step: BTreeMap<String, (String, Provenance)> = translations
        .iter()
        .filter(|(raw, _)| vocab.contains_key(*raw))
        .map(|(raw, tgt)| (raw.clone(), (tgt.clone(), Provenance::Translation)))
        .collect();
    compose(&mut composed, &translation_step, vocab.keys().cloned());
    apply_step(&mut posts, &translation_step);

    // Fold to a fixed point of the corpus itself: frequencies are recomputed
    // from the posts after every round, so a second normalize_corpus run
    // finds nothing left to fold.
    loop {
        vocab = post_freqs(&posts);
        let step = fold_round(&vocab, rules);
        if step.is_empty() {
            break;
        }
        compose(&mut composed, &step, vocab.keys().cloned());
        apply_step(&mut posts, &step);
    }

    for post in &mut posts {
        let mut seen = HashSet::new();
        post.hashtags.retain(|t| seen.insert(t.clone()));
    }

    report.vocabulary_after = vocab.len();
    composed.retain(|raw, (canonical, _)| raw != canonical);
    for (_, prov) in composed.values() {
        match prov {
            Provenance::Translation => report.translated += 1,
            Provenance::Plural => report.plural_folded += 1,
            Provenance::EditDistance => report.edit_distance_folded += 1,
            Provenance::CaseFold => {}
        }
    }

    Ok((
        PostCollection {
            posts,
            query: collection
                .query
                .iter()
                .filter_map(|q| canonical_form(q).ok())
                .collect(),
            source_files: collection.source_files.clone(),
        },
        report,
        VariantMap { entries: composed },
    ))
}

fn apply_step(posts: &mut [crate::corpus::Post], step: &BTreeMap<String, (String, Provenance)>) {
    if step.is_empty() {
        return;
    }
    for post in posts.iter_mut() {
        for tag in post.hashtags.iter_mut() {
            if let Some((target, _)) = step.get(tag) {
                *tag = target.clone();
            }
        }
    }
}

/// Translation map file: UTF-8 TSV `raw<TAB>canonical`, `//` comments.
pub fn load_translation_map(path: &Path) -> Result<BTreeMap<String, String>> {
    let content = std::fs::read_to_string(path).map_err(|source| TagnetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut map = BTreeMap::new();
    for (idx, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        let mut parts = line.splitn(2, '\t');
        match (parts.next(), parts.next()) {
            (Some(raw), Some(canonical)) if !raw.is_empty() && !canonical.is_empty() => {
                map.insert(raw.trim().to_owned(), canonical.trim().to_owned());
            }
            _ => {
                return Err(TagnetError::MalformedRecord {
                    line: idx + 1,
                    message: "expected raw<TAB>canonical".into(),
                })
            }
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Platform, Post};

    fn vocab(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
        pairs.iter().map(|(t, f)| (t.to_string(), *f)).collect()
    }

    fn post(id: &str, tags: &[&str]) -> Post {
        Post {
            id: id.into(),
            platform: Platform::Instagram,
            timestamp: None,
            text: None,
            hashtags: tags.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn canonical_form_folds_case() {
        assert_eq!(canonical_form("GreatBarrierReef").unwrap(), "greatbarrierreef");
    }

    #[test]
    fn canonical_form_strips_prefix() {
        assert_eq!(canonical_form("#Rapanui").unwrap(), "rapanui");
    }

    #[test]
    fn canonical_form_composes_unicode() {
        // "café" with a decomposed e + combining acute
        let decomposed = "Cafe\u{0301}";
        assert_eq!(canonical_form(decomposed).unwrap(), "caf\u{e9}");
    }

    #[test]
    fn canonical_form_rejects_empty() {
        assert!(matches!(canonical_form("###"), Err(TagnetError::EmptyToken { .. })));
        assert!(matches!(canonical_form("!!!"), Err(TagnetError::EmptyToken { .. })));
    }

    #[test]
    fn plural_folds_into_more_frequent_singular() {
        let map = build_variant_map(
            &vocab(&[("bird", 50), ("birds", 20)]),
            &NormalizationRules::default(),
        )
        .unwrap();
        assert_eq!(map.apply("birds"), "bird");
        assert_eq!(map.apply("bird"), "bird");
    }

    #[test]
    fn singular_folds_into_more_frequent_plural() {
        let map = build_variant_map(
            &vocab(&[("bird", 5), ("birds", 20)]),
            &NormalizationRules::default(),
        )
        .unwrap();
        assert_eq!(map.apply("bird"), "birds");
    }

    #[test]
    fn spelling_variant_folds_by_edit_distance() {
        let map = build_variant_map(
            &vocab(&[("traveller", 10), ("traveler", 40)]),
            &NormalizationRules::default(),
        )
        .unwrap();
        assert_eq!(map.apply("traveller"), "traveler");
    }

    #[test]
    fn singleton_vocabulary_has_no_folds() {
        let map =
            build_variant_map(&vocab(&[("reef", 100)]), &NormalizationRules::default()).unwrap();
        assert!(map.is_empty());
        assert_eq!(map.apply("reef"), "reef");
    }

    #[test]
    fn short_tokens_do_not_plural_fold() {
        // "as" -> "a" must not happen: stripped form is shorter than 4 chars.
        let map = build_variant_map(
            &vocab(&[("a", 50), ("as", 20)]),
            &NormalizationRules {
                variant_merge_enabled: false,
                ..NormalizationRules::default()
            },
        )
        .unwrap();
        assert_eq!(map.apply("as"), "as");
    }

    #[test]
    fn rare_typos_do_not_merge_into_each_other() {
        let rules = NormalizationRules {
            min_frequency_for_canonical: 2,
            plural_folding_enabled: false,
            ..NormalizationRules::default()
        };
        let map = build_variant_map(&vocab(&[("reeef", 1), ("reeff", 1)]), &rules).unwrap();
        assert!(map.is_empty());
    }

    #[test]
    fn most_frequent_candidate_wins_lexicographic_ties() {
        let rules = NormalizationRules {
            plural_folding_enabled: false,
            ..NormalizationRules::default()
        };
        // "reex" is distance 1 from both; equal frequencies, "reea" sorts first.
        let map =
            build_variant_map(&vocab(&[("reex", 1), ("reea", 9), ("reeb", 9)]), &rules).unwrap();
        assert_eq!(map.apply("reex"), "reea");
    }

    #[test]
    fn translation_applies_before_folding() {
        let rules = NormalizationRules {
            translation_map: [("isladepascua".to_string(), "easterisland".to_string())].into(),
            ..NormalizationRules::default()
        };
        let map =
            build_variant_map(&vocab(&[("isladepascua", 7), ("easterisland", 3)]), &rules).unwrap();
        assert_eq!(map.apply("isladepascua"), "easterisland");
    }

    #[test]
    fn variant_map_is_flat() {
        // chain: "abcdex" -(dist 1)-> "abcdes" -(plural)-> "abcde"
        let rules = NormalizationRules::default();
        let map = build_variant_map(
            &vocab(&[("abcdex", 1), ("abcdes", 5), ("abcde", 9)]),
            &rules,
        )
        .unwrap();
        for (raw, (canonical, _)) in &map.entries {
            assert_eq!(map.apply(map.apply(raw)), map.apply(raw), "chain at {raw}");
            assert_eq!(map.apply(canonical), canonical.as_str());
        }
        assert_eq!(map.apply("abcdex"), "abcde");
    }

    #[test]
    fn rebuilding_on_merged_vocab_is_identity() {
        let rules = NormalizationRules::default();
        let start = vocab(&[("bird", 10), ("birds", 4), ("traveler", 9), ("traveller", 3)]);
        let map = build_variant_map(&start, &rules).unwrap();
        let mut merged: BTreeMap<String, u64> = BTreeMap::new();
        for (t, f) in &start {
            *merged.entry(map.apply(t).to_owned()).or_insert(0) += f;
        }
        let again = build_variant_map(&merged, &rules).unwrap();
        assert!(again.is_empty(), "second build should fold nothing: {again:?}");
        // frequency mass is conserved
        assert_eq!(merged.values().sum::<u64>(), start.values().sum::<u64>());
    }

    #[test]
    fn corpus_normalization_collapses_case_and_plural() {
        let coll = PostCollection {
            posts: vec![post("p1", &["Bird", "birds"])],
            ..Default::default()
        };
        let (out, _, _) = normalize_corpus(&coll, &NormalizationRules::default()).unwrap();
        assert_eq!(out.posts[0].hashtags, vec!["bird"]);
    }

    #[test]
    fn empty_post_stays_empty() {
        let coll = PostCollection {
            posts: vec![post("p1", &[])],
            ..Default::default()
        };
        let (out, _, _) = normalize_corpus(&coll, &NormalizationRules::default()).unwrap();
        assert!(out.posts[0].hashtags.is_empty());
    }

    #[test]
    fn canonical_corpus_with_disabled_rules_is_unchanged() {
        let rules = NormalizationRules {
            variant_merge_enabled: false,
            plural_folding_enabled: false,
            ..NormalizationRules::default()
        };
        let coll = PostCollection {
            posts: vec![post("p1", &["reef", "diving"])],
            ..Default::default()
        };
        let (out, report, _) = normalize_corpus(&coll, &rules).unwrap();
        assert_eq!(out.posts[0].hashtags, coll.posts[0].hashtags);
        assert_eq!(report.vocabulary_before, report.vocabulary_after);
    }

    #[test]
    fn corpus_normalization_is_idempotent() {
        let coll = PostCollection {
            posts: vec![
                post("p1", &["Bird", "birds", "Reef"]),
                post("p2", &["birds", "reef", "reeef"]),
                post("p3", &["bird", "traveller"]),
                post("p4", &["traveler", "reef"]),
                post("p5", &["traveler", "bird"]),
            ],
            ..Default::default()
        };
        let rules = NormalizationRules::default();
        let (once, _, _) = normalize_corpus(&coll, &rules).unwrap();
        let (twice, report, map) = normalize_corpus(&once, &rules).unwrap();
        assert_eq!(once.posts, twice.posts);
        assert!(map.is_empty());
        assert_eq!(report.case_folded, 0);
    }

    #[test]
    fn vocabulary_never_grows() {
        let coll = PostCollection {
            posts: vec![post("p1", &["Bird", "BIRD", "birds", "cafe\u{0301}"])],
            ..Default::default()
        };
        let (_, report, _) = normalize_corpus(&coll, &NormalizationRules::default()).unwrap();
        assert!(report.vocabulary_after <= report.vocabulary_before);
    }

    #[test]
    fn translation_file_parses_tsv() {
        use std::io::Write as _;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "// local names").unwrap();
        writeln!(f, "isladepascua\teasterisland").unwrap();
        writeln!(f, "rapanui\teasterisland").unwrap();
        let map = load_translation_map(f.path()).unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map["rapanui"], "easterisland");
    }

    #[test]
    fn levenshtein_basics() {
        assert_eq!(levenshtein("", ""), 0);
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("abc", "abd"), 1);
        assert_eq!(levenshtein("traveller", "traveler"), 1);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
    }
}
