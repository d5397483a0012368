import logging

import pytest

from twosite.config import CONFIG_PATH_ENV_VAR, TwoSiteConfig


def test_creates_default_file(tmp_path):
    path = tmp_path / "sub" / "twosite.cfg"
    settings = TwoSiteConfig(str(path))
    assert path.exists()
    assert settings.get('OUTPUT', 'format') == 'csv'
    assert settings.getint('SWEEP', 'workers') == 1
    assert settings.getfloat('NUMERICS', 'null_space_rtol') == 1e-12
    assert settings.get_log_level() == logging.INFO


def test_environment_variable_selects_file(tmp_path, monkeypatch):
    path = tmp_path / "from-env.cfg"
    monkeypatch.setenv(CONFIG_PATH_ENV_VAR, str(path))
    assert TwoSiteConfig().config_path == path


def test_missing_keys_are_filled_in(tmp_path):
    path = tmp_path / "partial.cfg"
    path.write_text("[OUTPUT]\nformat = json\n")
    settings = TwoSiteConfig(str(path))
    assert settings.get_output_format() == 'json'
    assert settings.getint('OUTPUT', 'significant_digits') == 17
    assert "[NUMERICS]" in path.read_text()


def test_set_validates_and_persists(settings):
    settings.set('SWEEP', 'workers', 4)
    assert TwoSiteConfig(str(settings.config_path)).getint('SWEEP', 'workers') == 4
    settings.set('DEFAULT', 'log_level', 'DEBUG')
    assert settings.get_log_level() == logging.DEBUG


@pytest.mark.parametrize("section, key, value", [
    ('DEFAULT', 'log_level', 'LOUD'),
    ('OUTPUT', 'format', 'xml'),
    ('OUTPUT', 'significant_digits', '30'),
    ('SWEEP', 'workers', 'many'),
    ('SWEEP', 'workers', '0'),
    ('NUMERICS', 'null_space_rtol', '0.5'),
    ('NUMERICS', 'eigvec_cond_limit', 'big'),
])
def test_set_rejects_invalid_values(settings, section, key, value):
    with pytest.raises(ValueError):
        settings.set(section, key, value)


def test_numerics(settings):
    numerics = settings.get_numerics()
    assert numerics == {'null_space_rtol': 1e-12, 'eigvec_cond_limit': 1e8, 'trace_tol': 1e-12, 'psd_tol': 1e-12}


def test_output_dir_is_expanded(settings):
    assert not settings.get('DEFAULT', 'output_dir').startswith('~')


def test_sections(settings):
    assert settings.get_available_sections() == ['DEFAULT', 'NUMERICS', 'SWEEP', 'OUTPUT']
    assert settings.get_section('MISSING') is None
    assert settings.get('MISSING', 'key', 'fallback') == 'fallback'
    everything = settings.get_all_config()
    assert everything['OUTPUT'] == {'format': 'csv', 'significant_digits': '17'}
    assert 'log_level' in everything['DEFAULT']


def test_invalid_stored_values_fall_back(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("[DEFAULT]\nlog_level = LOUD\n[OUTPUT]\nformat = xml\n")
    settings = TwoSiteConfig(str(path))
    assert settings.get_log_level() == logging.INFO
    assert settings.get_output_format() == 'csv'
