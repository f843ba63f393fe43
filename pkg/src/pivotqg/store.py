"""Durable session storage: sqlite-backed key-value with a memory cache."""

from __future__ import annotations

import json
import sqlite3
import threading
import time
from pathlib import Path


class SessionStore:
    def __init__(self, path: str | Path = ":memory:"):
        self._conn = sqlite3.connect(str(path), check_same_thread=False)
        self._lock = threading.Lock()
        self._cache: dict[str, dict] = {}
        with self._lock:
            self._conn.execute(
                "CREATE TABLE IF NOT EXISTS sessions ("
                "id TEXT PRIMARY KEY, data TEXT NOT NULL, updated REAL NOT NULL)")
            self._conn.commit()

    def get(self, session_id: str) -> dict | None:
        with self._lock:
            if session_id in self._cache:
                return self._cache[session_id]
            row = self._conn.execute(
                "SELECT data FROM sessions WHERE id = ?", (session_id,)
            ).fetchone()
            if row is None:
                return None
            data = json.loads(row[0])
            self._cache[session_id] = data
            return data

    def put(self, session_id: str, data: dict) -> None:
        payload = json.dumps(data)
        with self._lock:
            self._conn.execute(
                "INSERT INTO sessions (id, data, updated) VALUES (?, ?, ?) "
                "ON CONFLICT(id) DO UPDATE SET data = excluded.data, "
                "updated = excluded.updated",
                (session_id, payload, time.time()))
            self._conn.commit()
            self._cache[session_id] = data

    def delete(self, session_id: str) -> None:
        with self._lock:
            self._conn.execute("DELETE FROM sessions WHERE id = ?",
                               (session_id,))
            self._conn.commit()
            self._cache.pop(session_id, None)

    def ids(self) -> list[str]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT id FROM sessions ORDER BY updated").fetchall()
        return [r[0] for r in rows]

    def close(self) -> None:
        with self._lock:
            self._conn.close()
