"""
World Bank Open Data API (v2) client for annual indicator series.

Responses are JSON lists of the form [paging metadata, observations]; an
error payload is a one-element list holding a "message" entry. In fixture
mode every request is answered by an httpx.MockTransport that replays
recorded responses from `fixtures/wdi/{ISO3}_{CODE}.json`, so no socket is
ever opened.
"""
import json
import logging
from datetime import date
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import httpx

from econometrics.exceptions import DataValidationError, FetchError, UnknownIndicatorError
from models.schemas import TimeSeries

logger = logging.getLogger(__name__)

INDICATOR_PATH = "/v2/country/{country}/indicator/{indicator}"

# Returned by the live API for unknown codes
_INVALID_VALUE = [{"message": [{"id": "120", "key": "Invalid value", "value": "The provided parameter value is not valid"}]}]


def fixture_path(fixtures_dir: Union[str, Path], country: str, indicator: str) -> Path:
    return Path(fixtures_dir) / f"{country.upper()}_{indicator}.json"


def fixture_transport(fixtures_dir: Union[str, Path]) -> httpx.MockTransport:
    """Transport that serves recorded responses byte-for-byte."""
    fixtures_dir = Path(fixtures_dir)

    def handler(request: httpx.Request) -> httpx.Response:
        parts = request.url.path.strip("/").split("/")
        # v2 / country / {iso3} / indicator / {code}
        if len(parts) != 5 or parts[1] != "country" or parts[3] != "indicator":
            return httpx.Response(404, text="Not found")
        path = fixture_path(fixtures_dir, parts[2], parts[4])
        if not path.exists():
            logger.debug("No fixture for %s; replying with an invalid-value payload", path.name)
            return httpx.Response(200, json=_INVALID_VALUE)
        return httpx.Response(200, content=path.read_bytes(), headers={"content-type": "application/json"})

    return httpx.MockTransport(handler)


class WdiConnector:
    def __init__(
        self,
        base_url: Optional[str] = None,
        timeout: Optional[float] = None,
        per_page: Optional[int] = None,
        fixtures_dir: Optional[Union[str, Path]] = None,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        from config import Config
        stage_config = Config.get_stage_config("wdi")
        self.base_url = (base_url or stage_config["base_url"]).rstrip("/")
        self.timeout = timeout or stage_config["timeout"]
        self.per_page = per_page or stage_config["per_page"]
        self.fixtures_dir = Path(fixtures_dir) if fixtures_dir else None

        if transport is None and self.fixtures_dir is not None:
            transport = fixture_transport(self.fixtures_dir)
        self.fixture_mode = self.fixtures_dir is not None
        self._transport = transport
        # indicator code -> "lastupdated" stamp of the most recent response
        self.vintages: Dict[str, str] = {}

    def _client(self) -> httpx.Client:
        return httpx.Client(base_url=self.base_url, timeout=self.timeout, transport=self._transport)

    def _get_page(self, client: httpx.Client, country: str, indicator: str, start: int, end: int, page: int):
        url = INDICATOR_PATH.format(country=country, indicator=indicator)
        params = {"format": "json", "per_page": self.per_page, "date": f"{start}:{end}", "page": page}
        try:
            resp = client.get(url, params=params)
            resp.raise_for_status()
            return resp.json()
        except httpx.HTTPStatusError as e:
            raise FetchError(f"World Bank API returned HTTP {e.response.status_code} for {indicator}/{country}")
        except httpx.HTTPError as e:
            raise FetchError(f"World Bank API request failed for {indicator}/{country}: {e}")
        except json.JSONDecodeError as e:
            raise FetchError(f"World Bank API returned invalid JSON for {indicator}/{country}: {e}")

    def _parse_page(self, payload, indicator: str, country: str) -> Tuple[dict, List[dict]]:
        if isinstance(payload, list) and payload and isinstance(payload[0], dict) and "message" in payload[0]:
            messages = "; ".join(m.get("value", "") for m in payload[0]["message"])
            raise UnknownIndicatorError(f"Unknown indicator or country {indicator}/{country}: {messages}")
        if not isinstance(payload, list) or len(payload) < 2 or not isinstance(payload[0], dict):
            raise FetchError(f"Unexpected World Bank payload for {indicator}/{country}")
        if payload[1] is None:
            raise UnknownIndicatorError(f"No observations for {indicator}/{country}")
        return payload[0], payload[1]

    def fetch(
        self,
        indicator: str,
        country: str,
        start: int,
        end: int,
        name: Optional[str] = None,
    ) -> TimeSeries:
        """
        Annual series for `start`..`end` inclusive.

        Every requested year must carry a value; a missing or null year is a
        DataValidationError rather than a silent gap.
        """
        if start > end:
            raise DataValidationError(f"Start year {start} is after end year {end}")
        country = country.upper()

        records: List[dict] = []
        with self._client() as client:
            page, pages = 1, 1
            while page <= pages:
                meta, rows = self._parse_page(self._get_page(client, country, indicator, start, end, page), indicator, country)
                records.extend(rows)
                pages = int(meta.get("pages", 1) or 1)
                self.vintages[indicator] = meta.get("lastupdated", "")
                page += 1

        values: Dict[int, float] = {}
        for item in records:
            try:
                year = int(item["date"])
            except (KeyError, TypeError, ValueError):
                raise FetchError(f"Observation without a usable date in {indicator}/{country}")
            if start <= year <= end and item.get("value") is not None:
                values[year] = float(item["value"])

        missing = [year for year in range(start, end + 1) if year not in values]
        if missing:
            raise DataValidationError(
                f"{indicator}/{country} has no value for year(s) {', '.join(str(y) for y in missing)}"
            )

        logger.info("Fetched %s/%s %d-%d (%s)", indicator, country, start, end, "fixture" if self.fixture_mode else "live")
        return TimeSeries(
            name=name or indicator,
            start_year=start,
            values=tuple(values[year] for year in range(start, end + 1)),
        )

    def fetch_many(self, indicators: Dict[str, str], country: str, start: int, end: int) -> Dict[str, TimeSeries]:
        """Fetch several indicators keyed by the series name they should carry."""
        return {name: self.fetch(code, country, start, end, name=name) for name, code in indicators.items()}

    @property
    def fetch_date(self) -> str:
        return date.today().isoformat()


def fetch_wdi(
    indicator: str,
    country: str,
    years: Tuple[int, int],
    fixtures_dir: Optional[Union[str, Path]] = None,
    transport: Optional[httpx.BaseTransport] = None,
) -> TimeSeries:
    start, end = years
    return WdiConnector(fixtures_dir=fixtures_dir, transport=transport).fetch(indicator, country, start, end)
