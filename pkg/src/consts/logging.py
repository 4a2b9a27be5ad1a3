from __future__ import annotations

FORMAT = "%(asctime)s:%(name)s:%(levelname)s:%(lineno)d:%(message)s"
