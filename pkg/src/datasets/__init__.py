from .coalition_csv import load_coalition_csv, save_coalition_csv, parse_coalition_csv, format_coalition_csv
from .task_matrix_csv import load_task_matrix_csv, save_task_matrix_csv, parse_task_matrix_csv, format_task_matrix_csv
from .manifest import Manifest, ManifestEntry, gen_manifest, load_manifest, save_manifest
from .fixtures import FIXTURE_DIR, load_fixture, load_reference_values, list_fixtures, verify_fixtures

__all__ = [
    'load_coalition_csv',
    'save_coalition_csv',
    'parse_coalition_csv',
    'format_coalition_csv',
    'load_task_matrix_csv',
    'save_task_matrix_csv',
    'parse_task_matrix_csv',
    'format_task_matrix_csv',
    'Manifest',
    'ManifestEntry',
    'gen_manifest',
    'load_manifest',
    'save_manifest',
    'FIXTURE_DIR',
    'load_fixture',
    'load_reference_values',
    'list_fixtures',
    'verify_fixtures',
]
