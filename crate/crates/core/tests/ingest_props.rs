use proptest::prelude::*;
use serde_json::json;
use voidlens::ingest::parse_corpus;
use voidlens::kb::KnowledgeBase;

const SOURCES: &str = "{\"source_id\":\"s1\",\"name\":\"One\",\"description\":\"\",\"kind\":\"page\"}\n{\"source_id\":\"s2\",\"name\":\"Two\",\"description\":\"d\",\"kind\":\"group\"}\n";

fn line_strategy() -> impl Strategy<Value = String> {
    prop_oneof![
        // Valid post.
        (any::<u16>(), "[\\PC]{0,40}", 0u64..1000, 0u64..1000, 0u64..1000, proptest::option::of("[a-z]{2}"), 0i64..100_000_000, prop::bool::ANY)
            .prop_map(|(id, text, l, c, s, lang, secs, src)| {
                let mut v = json!({"post_id": format!("p{id}"), "source_id": if src { "s1" } else { "s2" },
                    "text": text, "created_at": chrono::DateTime::from_timestamp(1_600_000_000 + secs, 0).unwrap().to_rfc3339(),
                    "likes": l, "comments": c, "shares": s});
                if let Some(lang) = lang { v["language"] = json!(lang); }
                v.to_string()
            }),
        // Negative engagement.
        any::<u16>().prop_map(|id| json!({"post_id": format!("n{id}"), "source_id": "s1", "text": "x",
            "created_at": "2022-10-01T00:00:00Z", "likes": -1, "comments": 0, "shares": 0}).to_string()),
        // Garbage and unknown sources.
        "[a-z{}]{0,10}",
        any::<u16>().prop_map(|id| json!({"post_id": format!("u{id}"), "source_id": "nope", "text": "x",
            "created_at": "2022-10-01T00:00:00Z", "likes": 0, "comments": 0, "shares": 0}).to_string()),
    ]
}

proptest! {
    #[test]
    fn every_line_accounted_for_and_round_trips(lines in prop::collection::vec(line_strategy(), 0..40)) {
        let input = lines.iter().map(|l| format!("{l}\n")).collect::<String>();
        let parsed = parse_corpus(input.as_bytes(), SOURCES.as_bytes()).unwrap();
        prop_assert_eq!(parsed.post_lines, lines.len());
        prop_assert_eq!(parsed.corpus.len() + parsed.rejects.posts.len(), lines.len());

        // Accepted posts keep input order.
        let mut last_line = 0;
        let reject_lines: Vec<usize> = parsed.rejects.posts.iter().map(|r| r.line_no).collect();
        let accepted_lines: Vec<usize> = (1..=lines.len()).filter(|n| !reject_lines.contains(n)).collect();
        for (post, &line_no) in parsed.corpus.posts().iter().zip(&accepted_lines) {
            prop_assert!(line_no > last_line);
            last_line = line_no;
            prop_assert!(lines[line_no - 1].contains(&serde_json::to_string(&post.post_id).unwrap()));
        }

        let mut posts_out = Vec::new();
        let mut sources_out = Vec::new();
        parsed.corpus.write_posts_jsonl(&mut posts_out).unwrap();
        parsed.corpus.write_sources_jsonl(&mut sources_out).unwrap();
        let again = parse_corpus(&posts_out[..], &sources_out[..]).unwrap();
        prop_assert!(again.rejects.is_empty());
        prop_assert_eq!(again.corpus, parsed.corpus);
    }

    #[test]
    fn entity_matching_ignores_case(words in prop::collection::vec(prop_oneof![
        Just("Joe Biden".to_string()), Just("nytimes.com/x".to_string()), Just("Bidenomics".to_string()),
        "[a-zA-Z]{1,8}"], 0..12), flips in prop::collection::vec(any::<bool>(), 0..200)) {
        let kb = KnowledgeBase::builder().website("nytimes.com", -0.6).actor("joe biden", -0.8).actor("biden", -0.7).build();
        let text = words.join(" ");
        let flipped: String = text.chars().zip(flips.iter().chain(std::iter::repeat(&false)))
            .map(|(c, &f)| if f { c.to_ascii_uppercase() } else { c.to_ascii_lowercase() })
            .collect();
        prop_assert_eq!(kb.match_entities(&text), kb.match_entities(&flipped));
        prop_assert!(kb.match_entities("").is_empty());
    }
}
