"""
Upload handler for price panels.
Handles CSV validation, storage under .data/ and dataset management.
"""
import json
import logging
import shutil
from datetime import datetime
from pathlib import Path
from typing import Optional

from config import DATA_DIR, DATE_COLUMN, MANIFEST_FILE, PANEL_FILE
from data_loader import load_panel, read_table
from errors import DataError

logger = logging.getLogger(__name__)


def ensure_data_dir() -> Path:
    """Ensure the .data directory exists."""
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    return DATA_DIR


def generate_dataset_id() -> str:
    """Generate a unique dataset ID based on current timestamp."""
    base = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
    dataset_id, n = base, 1
    while (DATA_DIR / dataset_id).exists():
        n += 1
        dataset_id = f"{base}_{n}"
    return dataset_id


def validate_panel_csv(csv_path: Path, date_column: str = DATE_COLUMN) -> tuple[bool, list[str]]:
    """
    Validate that a CSV holds a usable price panel: a date column, at least
    two price columns, increasing dates and a number in every cell.

    Returns:
        Tuple of (is_valid, list of error messages)
    """
    try:
        df = read_table(csv_path)
    except DataError as e:
        return False, [str(e)]

    errors = []
    if date_column not in df.columns:
        errors.append(f"Missing date column: {date_column}")
    prices = [c for c in df.columns if c != date_column]
    if len(prices) < 2:
        errors.append(f"Need at least 2 price columns, found {len(prices)}")
    if errors:
        return False, errors

    # Pair the first column with each other one; this checks every cell and the dates
    for column in prices[1:]:
        try:
            load_panel(csv_path, prices[0], column, date_column)
        except DataError as e:
            if str(e) not in errors:
                errors.append(str(e))

    return len(errors) == 0, errors


def get_dataset_stats(dir_path: Path, date_column: str = DATE_COLUMN) -> dict:
    """Get statistics about a dataset."""
    stats = {
        "columns": [],
        "n_obs": 0,
        "first_date": None,
        "last_date": None,
        "date_column": date_column,
    }
    try:
        df = read_table(dir_path / PANEL_FILE)
    except DataError:
        return stats

    stats["columns"] = [c for c in df.columns if c != date_column]
    stats["n_obs"] = len(df)
    if len(df) and date_column in df.columns:
        stats["first_date"] = df[date_column].iloc[0].strip()
        stats["last_date"] = df[date_column].iloc[-1].strip()
    return stats


def create_manifest(dir_path: Path, source_filename: str, date_column: str = DATE_COLUMN) -> dict:
    """Create a manifest file for the dataset."""
    manifest = {
        "upload_date": datetime.now().isoformat(),
        "source_filename": source_filename,
        **get_dataset_stats(dir_path, date_column),
    }

    with open(dir_path / MANIFEST_FILE, 'w') as f:
        json.dump(manifest, f, indent=2)

    return manifest


def load_manifest(dir_path: Path) -> Optional[dict]:
    """Load manifest from a dataset directory."""
    manifest_path = dir_path / MANIFEST_FILE
    if manifest_path.exists():
        try:
            with open(manifest_path, 'r') as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning("Unreadable manifest %s: %s", manifest_path, e)
    return None


def get_available_datasets() -> list[dict]:
    """
    Get list of uploaded datasets in the .data directory.

    Returns:
        List of dicts with dataset info, sorted by upload date (newest first)
    """
    ensure_data_dir()
    datasets = []

    for item in DATA_DIR.iterdir():
        if not item.is_dir():
            continue
        manifest = load_manifest(item)
        if manifest:
            datasets.append({"path": str(item), "id": item.name, **manifest})
        elif (item / PANEL_FILE).exists():
            # Panel without a manifest: describe it from the file itself
            is_valid, _ = validate_panel_csv(item / PANEL_FILE)
            if is_valid:
                datasets.append({
                    "path": str(item),
                    "id": item.name,
                    "upload_date": None,
                    "source_filename": "Unknown",
                    **get_dataset_stats(item),
                })

    # Sort by upload date (newest first), with None dates last
    datasets.sort(
        key=lambda x: x.get("upload_date") or "0000-00-00",
        reverse=True
    )

    return datasets


def delete_dataset(dataset_path: str) -> tuple[bool, str]:
    """
    Delete a dataset directory.

    Args:
        dataset_path: Path to the dataset directory

    Returns:
        Tuple of (success, message)
    """
    try:
        path = Path(dataset_path).resolve()
        data_dir_resolved = DATA_DIR.resolve()

        if not path.exists():
            return False, "Dataset not found"

        # Security check: ensure path is within DATA_DIR
        try:
            path.relative_to(data_dir_resolved)
        except ValueError:
            return False, "Invalid dataset path"
        if path == data_dir_resolved:
            return False, "Invalid dataset path"

        shutil.rmtree(path)
        return True, "Dataset deleted successfully"

    except OSError as e:
        return False, f"Failed to delete dataset: {str(e)}"


def process_upload(csv_file, filename: str,
                   date_column: str = DATE_COLUMN) -> tuple[bool, str, Optional[str]]:
    """
    Store an uploaded price panel.

    Args:
        csv_file: File-like object containing the CSV
        filename: Original filename
        date_column: Name of the date column

    Returns:
        Tuple of (success, message, dataset_path or None)
    """
    ensure_data_dir()

    dataset_id = generate_dataset_id()
    target_dir = DATA_DIR / dataset_id
    target_dir.mkdir(parents=True)

    try:
        # Reset file pointer to beginning (important for Streamlit UploadedFile)
        if hasattr(csv_file, 'seek'):
            csv_file.seek(0)
        content = csv_file.read()
        if isinstance(content, str):
            content = content.encode('utf-8')
        (target_dir / PANEL_FILE).write_bytes(content)

        is_valid, errors = validate_panel_csv(target_dir / PANEL_FILE, date_column)
        if is_valid:
            manifest = create_manifest(target_dir, filename, date_column)
    except Exception as e:
        shutil.rmtree(target_dir, ignore_errors=True)
        logger.exception("Upload of %s failed", filename)
        return False, f"Error processing upload: {str(e)}", None

    if not is_valid:
        # Clean up on failure
        shutil.rmtree(target_dir)
        return False, "Invalid price panel:\n- " + "\n- ".join(errors), None

    logger.info("Stored %s as dataset %s", filename, dataset_id)

    return (
        True,
        f"Imported {manifest['n_obs']} observations of {len(manifest['columns'])} series "
        f"({manifest['first_date']} to {manifest['last_date']})",
        str(target_dir),
    )
