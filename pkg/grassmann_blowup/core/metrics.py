import pandas as pd

from core.plucker_model import ModelSystem, rank_table


def relation_metrics(model: ModelSystem) -> pd.DataFrame:
    """
    Таблиця первинної сім'ї: k, провідний індекс, ранг, кількість членів і бінома.
    :param model: Модель 𝒱_m
    :return: DataFrame з рядком на кожне F_k
    """
    df = pd.DataFrame(rank_table(model))
    df["binomials"] = df["terms"] - 1
    df["relation"] = [str(F) for F in model.family]
    return df


def tower_metrics(run) -> dict:
    """
    Основні лічильники вежі роздуттів.
    :param run: TowerRun
    :return: Словник з лічильниками
    """
    per_stage = {stage: 0 for stage in ("theta", "wp", "eth")}
    for event in run.events:
        per_stage[event.index.stage] += 1
    return {
        "Base Charts": len(run.bases),
        "Charts Created": len(run.charts),
        "Final Charts": len(run.leaves),
        "Pruned": len(run.pruned),
        "Skipped Holders": len(run.skipped),
        "Theta Blowups": per_stage["theta"],
        "Wp Blowups": per_stage["wp"],
        "Eth Blowups": per_stage["eth"],
        "Unterminated": len(run.unterminated()),
    }


def round_table(run) -> pd.DataFrame:
    """Кількість раундів ℘ (rho) та ð (kappa) і кроки в раундах для кожного B_(kτ)."""
    return pd.DataFrame(run.summary_rows(), columns=["k", "tau", "rho", "sigma", "kappa", "varsigma"])


def gamma_metrics(result) -> pd.DataFrame:
    rows = []
    for state in result.final:
        rows.append({
            "chart": state.chart.id,
            "zero": len(state.zero),
            "one": len(state.one),
            "linear": len(state.alive),
            "status": ("empty" if state.empty else "redundant" if state.redundant
                       else "undecided" if state.undecided else "active"),
        })
    return pd.DataFrame(rows, columns=["chart", "zero", "one", "linear", "status"])


def certification_metrics(report) -> pd.DataFrame:
    df = pd.DataFrame(report.summary_rows(), columns=["chart", "points", "expected_rank", "min_rank", "failures", "dims"])
    return df.sort_values("chart").reset_index(drop=True)
