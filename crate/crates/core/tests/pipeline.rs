use std::collections::{BTreeMap, HashMap};

use qa_archetypes::archetype::Archetype;
use qa_archetypes::features::{duplicate_max, many_peaks};
use qa_archetypes::ingest::{parse_event_csv, write_event_csv, ActivityKind};
use qa_archetypes::pipeline::{analyze, evolution, AnalysisConfig, CheckpointOutcome, EvolutionConfig};
use qa_archetypes::report::{InstanceReport, ModelExport};
use qa_archetypes::series::{build_user_series, truncate_events, Granularity};
use qa_archetypes::synth::{generate_instance, generate_user, MixtureSpec, SyntheticInstance, UserProfile};

fn typical() -> SyntheticInstance {
    generate_instance(&MixtureSpec::typical(2000, 60, 42)).unwrap()
}

#[test]
fn composition_recounts_from_raw_events() {
    let inst = typical();
    let a = analyze::<f64>(&inst.events, &inst.window, &AnalysisConfig::default()).unwrap();
    let cl = &a.clustered;
    let archetype_of: HashMap<&str, Archetype> = cl
        .user_ids
        .iter()
        .zip(&cl.selection.model.labels)
        .map(|(u, &c)| (u.as_str(), cl.labels.of(c)))
        .collect();
    let mut recount: BTreeMap<Archetype, (u64, u64)> = BTreeMap::new();
    for e in &inst.events {
        let slot = recount.entry(archetype_of[e.user_id.as_str()]).or_default();
        match e.kind {
            ActivityKind::Question => slot.0 += 1,
            ActivityKind::Answer | ActivityKind::Comment => slot.1 += 1,
        }
    }
    for entry in &cl.composition.entries {
        assert_eq!(recount.get(&entry.archetype).copied().unwrap_or_default(), (entry.questions, entry.answers));
    }
    let q: f64 = cl.composition.entries.iter().filter_map(|e| e.question_fraction).sum();
    let ans: f64 = cl.composition.entries.iter().filter_map(|e| e.answer_fraction).sum();
    assert!((q - 1.0).abs() < 1e-9 && (ans - 1.0).abs() < 1e-9);
}

#[test]
fn stats_are_consistent_and_ordered() {
    let inst = typical();
    let a = analyze::<f64>(&inst.events, &inst.window, &AnalysisConfig::default()).unwrap();
    let users: f64 = a.stats.iter().map(|s| s.user_fraction).sum();
    assert!((users - 1.0).abs() < 1e-9);
    for s in a.series.users.values() {
        assert!(s.active_count() <= s.tenure() + 1);
        assert!(s.tenure() < a.series.window.month_count());
    }
    let median_total = |name: Archetype| {
        let members: Vec<u64> = a
            .clustered
            .user_ids
            .iter()
            .zip(&a.clustered.selection.model.labels)
            .filter(|(_, &c)| a.clustered.labels.of(c) == name)
            .map(|(u, _)| a.series.users[u].total())
            .collect();
        let mut m = members;
        m.sort_unstable();
        m[m.len() / 2]
    };
    let nr = median_total(Archetype::NonRecurring);
    let sp = median_total(Archetype::Sporadic);
    let fr = median_total(Archetype::Frequent);
    let pe = median_total(Archetype::Permanent);
    assert!(nr < sp && sp < fr && fr <= pe, "{nr} {sp} {fr} {pe}");
    let nr_stats = a.stats.iter().find(|s| s.name == Archetype::NonRecurring).unwrap();
    assert_eq!(nr_stats.median_questions, Some(1.0));
    assert_eq!(nr_stats.median_tenure_months, Some(0.0));
}

#[test]
fn prefix_series_equal_truncated_series() {
    let inst = generate_instance(&MixtureSpec::typical(400, 36, 3)).unwrap();
    let full = build_user_series(&inst.events, &inst.window, Granularity::Month);
    for months in [1, 6, 17, 36] {
        let prefix = inst.window.prefix(months).unwrap();
        let cut = truncate_events(&inst.events, prefix.end_month());
        let part = build_user_series(&cut, &prefix, Granularity::Month);
        for (user, s) in &part.users {
            assert_eq!(*s, full.users[user].truncated(months));
        }
        let expected = full.users.values().filter(|s| s.truncated(months).total() > 0).count();
        assert_eq!(part.user_count(), expected);
    }
}

#[test]
fn generated_profiles_hit_their_corners() {
    let corner = |p: UserProfile, seed| {
        let u = generate_user(p, 60, seed).unwrap();
        (many_peaks(&u.answers, 5), duplicate_max(&u.answers))
    };
    for seed in 0..1000 {
        assert_eq!(corner(UserProfile::NonRecurring, seed), (false, false));
        assert_eq!(corner(UserProfile::Sporadic, seed), (false, true), "sporadic seed {seed}");
        assert_eq!(corner(UserProfile::Frequent, seed), (true, false), "frequent seed {seed}");
        assert_eq!(corner(UserProfile::Permanent, seed), (true, true), "permanent seed {seed}");
    }
}

#[test]
fn report_bytes_are_reproducible() {
    let inst = generate_instance(&MixtureSpec::typical(500, 48, 9)).unwrap();
    let mut csv = Vec::new();
    write_event_csv(&inst.events, &mut csv).unwrap();
    let reparsed = parse_event_csv(csv.as_slice()).unwrap();
    assert_eq!(reparsed.events, inst.events);

    let config = AnalysisConfig { evolution: Some(EvolutionConfig::default()), ..AnalysisConfig::default() };
    let one = analyze::<f64>(&inst.events, &inst.window, &config).unwrap();
    let two = analyze::<f64>(&reparsed.events, &inst.window, &config).unwrap();
    assert_eq!(InstanceReport::from_analysis(&one).to_json(), InstanceReport::from_analysis(&two).to_json());
    assert_eq!(ModelExport::from_analysis(&one).to_json(), ModelExport::from_analysis(&two).to_json());
}

#[test]
fn single_precision_pipeline_agrees() {
    let inst = typical();
    let a64 = analyze::<f64>(&inst.events, &inst.window, &AnalysisConfig::default()).unwrap();
    let a32 = analyze::<f32>(&inst.events, &inst.window, &AnalysisConfig::default()).unwrap();
    assert_eq!(a64.instance_type(), a32.instance_type());
    assert_eq!(a64.clustered.selection.k_star, a32.clustered.selection.k_star);
}

#[test]
fn six_month_instance_has_one_checkpoint() {
    let inst = generate_instance(&MixtureSpec::staged(5)).unwrap();
    let window = inst.window.prefix(6).unwrap();
    let events = truncate_events(&inst.events, window.end_month());
    let track = evolution::<f64>(&events, &window, &AnalysisConfig::default(), &EvolutionConfig::default()).unwrap();
    assert_eq!(track.len(), 1);
    assert_eq!(track[0].cutoff_month, 6);

    let young = window.prefix(5).unwrap();
    let events = truncate_events(&inst.events, young.end_month());
    assert!(evolution::<f64>(&events, &young, &AnalysisConfig::default(), &EvolutionConfig::default()).is_err());
}

#[test]
fn evolution_never_calls_many_clusters_sustainable() {
    for seed in [1, 2] {
        let inst = generate_instance(&MixtureSpec::staged(seed)).unwrap();
        let track =
            evolution::<f64>(&inst.events, &inst.window, &AnalysisConfig::default(), &EvolutionConfig::default())
                .unwrap();
        for c in &track {
            if let (CheckpointOutcome::Classified(t), Some(k)) = (c.outcome, c.k_star) {
                assert_eq!(t == qa_archetypes::archetype::InstanceType::Emerging, k > 4);
            }
        }
    }
}
