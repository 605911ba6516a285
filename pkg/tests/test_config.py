from arbcolor.utils.config import Settings, get_settings, reset_settings


def test_defaults():
    settings = Settings()
    assert settings.workers == 4
    assert settings.round_limit == 100_000
    assert settings.dispatch_threshold == 40.0
    assert settings.congest_constant == 4.0
    assert settings.log_level == "INFO"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("ARBCOLOR_WORKERS", "9")
    monkeypatch.setenv("ARBCOLOR_DISPATCH_THRESHOLD", "2.5")
    settings = Settings()
    assert settings.workers == 9
    assert settings.dispatch_threshold == 2.5


def test_settings_are_cached_until_reset(monkeypatch):
    first = get_settings()
    monkeypatch.setenv("ARBCOLOR_WORKERS", "2")
    assert get_settings() is first
    reset_settings()
    assert get_settings().workers == 2
