use std::fs;
use std::path::PathBuf;

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

/// Set `ADAMIR_BLESS=1` to rewrite the checked-in files after changing an output type.
#[test]
fn checked_in_schemas_match_output_types() {
    let bless = std::env::var_os("ADAMIR_BLESS").is_some();
    for (name, schema) in adamir_cli::output_schemas() {
        let path = schema_dir().join(name);
        let generated = serde_json::to_string_pretty(&schema).unwrap() + "\n";
        if bless {
            fs::create_dir_all(schema_dir()).unwrap();
            fs::write(&path, &generated).unwrap();
            continue;
        }
        let on_disk = fs::read_to_string(&path).unwrap_or_default();
        assert_eq!(
            on_disk, generated,
            "{name} is stale; rerun with ADAMIR_BLESS=1"
        );
    }
}
