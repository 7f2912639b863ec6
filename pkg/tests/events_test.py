import sys
import logging
from pathlib import Path

# Add the project root to the Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.events import EVENT_TYPES, EventSystem

logger = logging.getLogger('test')


def test_subscribers_run_in_order():
    bell = EventSystem()
    calls = []
    bell.subscribe('models_selected', lambda data: calls.append(('first', data['count'])))
    bell.subscribe('models_selected', lambda data: calls.append(('second', data['count'])))
    bell.publish('models_selected', {'count': 3})
    assert calls == [('first', 3), ('second', 3)]


def test_publish_without_subscribers_is_a_no_op():
    EventSystem().publish('sweep_row', {'sigma': 0.1})


def test_failing_subscriber_is_logged_not_raised(caplog):
    bell = EventSystem()
    calls = []

    def broken(data):
        raise RuntimeError("boom")

    bell.subscribe('bicluster_extracted', broken)
    bell.subscribe('bicluster_extracted', calls.append)
    with caplog.at_level(logging.ERROR, logger='events'):
        bell.publish('bicluster_extracted', {'index': 0})
    assert calls == [{'index': 0}]
    assert 'broken' in caplog.text


def test_unknown_event_type_warns(caplog):
    bell = EventSystem()
    with caplog.at_level(logging.WARNING, logger='events'):
        bell.subscribe('price_update', lambda data: None)
    assert 'price_update' in caplog.text
    assert 'price_update' not in EVENT_TYPES


def test_unsubscribe_and_clear():
    bell = EventSystem()
    calls = []
    bell.subscribe('candidate_discarded', calls.append)
    bell.unsubscribe('candidate_discarded', calls.append)
    bell.publish('candidate_discarded', {'reason': 'not_significant'})
    assert calls == []

    bell.unsubscribe('factor_extracted', calls.append)

    bell.subscribe('factor_extracted', calls.append)
    bell.clear()
    bell.publish('factor_extracted', {'index': 1})
    assert calls == []
