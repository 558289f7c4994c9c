use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quasiconf::canon::canonical_form;
use quasiconf::catalog::build_catalog;
use quasiconf::enumerate::canonical_forms;
use quasiconf::format::StructureFile;
use quasiconf::obstruction::euler_obstruction;

#[test]
fn enumerator_finds_every_catalog_entry() {
    for e in build_catalog() {
        let forms = canonical_forms(&e.structure.signature(), false).unwrap();
        let own = canonical_form(&e.structure);
        assert!(forms.binary_search(&own).is_ok(), "{} missing from its own class list", e.name);
    }
}

#[test]
fn canonical_form_survives_random_relabelings() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for e in build_catalog() {
        let s = &e.structure;
        let form = canonical_form(s);
        let mut pp: Vec<usize> = (0..s.num_points()).collect();
        let mut lp: Vec<usize> = (0..s.num_lines()).collect();
        for _ in 0..1000 {
            pp.shuffle(&mut rng);
            lp.shuffle(&mut rng);
            assert_eq!(canonical_form(&s.permuted(&pp, &lp)), form, "{}", e.name);
        }
    }
}

#[test]
fn realized_entries_pass_the_euler_inequality() {
    let mut realized = 0;
    for e in build_catalog() {
        if e.realization.is_some() {
            realized += 1;
            assert!(euler_obstruction(&e.structure.signature()).satisfiable, "{}", e.name);
        }
    }
    assert_eq!(realized, 9);
}

#[test]
fn files_round_trip_through_disk() {
    let dir = std::env::temp_dir().join(format!("quasiconf-roundtrip-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for e in build_catalog() {
        let path = dir.join(format!("{}.json", e.name));
        e.file().save(&path).unwrap();
        let once = StructureFile::load(&path).unwrap();
        once.save(&path).unwrap();
        let twice = StructureFile::load(&path).unwrap();
        assert_eq!(once.to_json(), twice.to_json(), "{}", e.name);
        let (s, r) = twice.load_parts().unwrap();
        assert_eq!(s, e.structure);
        assert_eq!(r.is_some(), e.realization.is_some());
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
