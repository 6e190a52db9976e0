"""
database.py
SQLite を使ったベンチマーク結果の永続化モジュール。
aiosqlite を使用して非同期で DB 操作を行う。
"""

import logging
from datetime import datetime
from pathlib import Path

import aiosqlite

from bench import BenchRow

logger = logging.getLogger(__name__)

MODES = ("constrained", "unconstrained", "unplaced")


class BenchHistory:
    def __init__(self, db_path: str | Path):
        self._db_path = str(db_path)

    async def init_db(self) -> None:
        """テーブルを作成する。親ディレクトリが存在しない場合は自動生成する。"""
        Path(self._db_path).parent.mkdir(parents=True, exist_ok=True)

        async with aiosqlite.connect(self._db_path) as db:
            await db.executescript("""
                CREATE TABLE IF NOT EXISTS bench_runs (
                    id                INTEGER PRIMARY KEY AUTOINCREMENT,
                    architecture      TEXT NOT NULL,
                    input_cnots       INTEGER NOT NULL,
                    samples           INTEGER NOT NULL,
                    mean_output_cnots REAL NOT NULL,
                    overhead_percent  REAL NOT NULL,
                    seed              INTEGER NOT NULL,
                    mode              TEXT NOT NULL,
                    created_at        TEXT NOT NULL
                );

                CREATE INDEX IF NOT EXISTS idx_bench_runs_arch
                    ON bench_runs (architecture, input_cnots);
            """)
            await db.commit()
        logger.info(f"DB 初期化完了: {self._db_path}")

    # ── 公開 API / Public API ───────────────────────────────────────────────

    async def save_rows(self, rows: list[BenchRow], mode: str) -> int:
        """BenchRow をまとめて保存し、挿入件数を返す。"""
        if mode not in MODES:
            raise ValueError(f"不明なモード / unknown mode: {mode}")
        now = datetime.now().isoformat(timespec="seconds")
        async with aiosqlite.connect(self._db_path) as db:
            await db.executemany(
                """
                INSERT INTO bench_runs
                    (architecture, input_cnots, samples, mean_output_cnots,
                     overhead_percent, seed, mode, created_at)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?)
                """,
                [
                    (r.architecture, r.input_cnots, r.samples, r.mean_output_cnots,
                     r.overhead_percent, r.seed, mode, now)
                    for r in rows
                ],
            )
            await db.commit()
        logger.info(f"ベンチ結果を保存: {len(rows)} 件 ({mode})")
        return len(rows)

    async def get_rows(self, architecture: str | None = None, limit: int = 100) -> list[dict]:
        """保存済みの行を新しい順に返す。architecture で絞り込み可能。"""
        query = "SELECT * FROM bench_runs"
        params: list = []
        if architecture:
            query += " WHERE architecture = ?"
            params.append(architecture)
        query += " ORDER BY id DESC LIMIT ?"
        params.append(limit)
        async with aiosqlite.connect(self._db_path) as db:
            db.row_factory = aiosqlite.Row
            async with db.execute(query, params) as cursor:
                return [dict(row) for row in await cursor.fetchall()]
