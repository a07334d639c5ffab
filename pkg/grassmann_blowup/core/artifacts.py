import hashlib
import json
import os
from typing import Dict, List

import pandas as pd


def compute_checksum(text: str) -> str:
    """
    Обчислює контрольну суму (MD5) для перевірки цілісності артефакту.
    """
    return hashlib.md5(text.encode("utf-8")).hexdigest()


def dump_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def save_json(data, filepath: str) -> str:
    """
    Зберігає артефакт у JSON (ключі відсортовано) разом із файлом контрольної суми.

    :return: MD5 записаного тексту.
    """
    directory = os.path.dirname(filepath)
    if directory:
        os.makedirs(directory, exist_ok=True)
    text = dump_json(data)
    with open(filepath, "w", encoding="utf-8") as f:
        f.write(text)
    checksum = compute_checksum(text)
    with open(filepath + ".md5", "w") as f:
        f.write(checksum)
    return checksum


def load_json(filepath: str):
    """
    Завантажує JSON-артефакт і перевіряє його цілісність за контрольною сумою.
    """
    if not os.path.exists(filepath):
        raise FileNotFoundError(f"File not found: {filepath}")
    md5_path = filepath + ".md5"
    if not os.path.exists(md5_path):
        raise FileNotFoundError(f"Checksum not found: {md5_path}")
    with open(filepath, "r", encoding="utf-8") as f:
        text = f.read()
    with open(md5_path, "r") as f:
        saved_checksum = f.read().strip()
    if compute_checksum(text) != saved_checksum:
        raise ValueError("Checksum mismatch.")
    return json.loads(text)


def save_table(rows: List[dict], filepath: str) -> pd.DataFrame:
    df = pd.DataFrame(rows)
    directory = os.path.dirname(filepath)
    if directory:
        os.makedirs(directory, exist_ok=True)
    df.to_csv(filepath, index=False)
    return df


class ArtifactWriter:
    """
    Записує артефакти одного запуску в out_dir і збирає їхні контрольні суми для маніфесту.
    Час виконання потрапляє лише в timings.csv.
    """

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.hashes: Dict[str, str] = {}
        self.timings: List[dict] = []
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def json(self, name: str, data) -> str:
        self.hashes[name] = save_json(data, self.path(name))
        return self.path(name)

    def table(self, name: str, rows: List[dict]) -> pd.DataFrame:
        return save_table(rows, self.path(name))

    def time(self, step: str, seconds: float):
        self.timings.append({"step": step, "seconds": round(seconds, 3)})

    def manifest(self, config, command: str, status: str, extra: dict = None) -> str:
        data = {
            "command": command,
            "config": config.to_dict(),
            "config_hash": config.config_hash(),
            "status": status,
            "artifacts": dict(sorted(self.hashes.items())),
        }
        data.update(extra or {})
        if self.timings:
            save_table(self.timings, self.path("timings.csv"))
        return self.json("manifest.json", data)
