"""
Simple event system for underfit
Direct event emission and subscription, no middleware
"""
import logging
from typing import Any, Callable, Dict, List

logger = logging.getLogger('events')


class EventSystem:
    """
    Simple pub/sub event system
    Subscribers are plain callables run in subscription order
    """
    def __init__(self):
        self.subscribers: Dict[str, List[Callable[[Dict[str, Any]], None]]] = {}
        self.logger = logging.getLogger('events')

    def publish(self, event_type: str, data: Dict[str, Any]):
        """Publish event directly to subscribers; subscriber errors are logged, never raised"""
        if event_type not in self.subscribers:
            return

        self.logger.debug(f"Publishing {event_type} event")
        for subscriber in list(self.subscribers[event_type]):
            try:
                subscriber(data)
            except Exception as e:
                name = getattr(subscriber, '__name__', str(subscriber))
                self.logger.error(f"Error in subscriber {name} for {event_type}: {e}", exc_info=True)

    def subscribe(self, event_type: str, callback: Callable[[Dict[str, Any]], None]):
        """Subscribe to event type"""
        if event_type not in EVENT_TYPES:
            self.logger.warning(f"Subscribing to unknown event type: {event_type}")
        self.subscribers.setdefault(event_type, []).append(callback)
        self.logger.debug(f"Subscribed to event: {event_type}")

    def unsubscribe(self, event_type: str, callback: Callable[[Dict[str, Any]], None]):
        """Unsubscribe from event type"""
        if event_type in self.subscribers and callback in self.subscribers[event_type]:
            self.subscribers[event_type].remove(callback)
            self.logger.debug(f"Unsubscribed from event: {event_type}")

    def clear(self):
        self.subscribers.clear()


# Single event system instance
event_bell = EventSystem()

# Core event types
EVENT_TYPES = {
    # Factorization events
    'factor_extracted',      # One NMU factor out of the multi-factor loop

    # Robust fitting events
    'bicluster_extracted',   # Factor of P refitted and tested
    'candidate_discarded',   # Factor dropped (support or test)
    'models_selected',       # Winning independent set

    # CLI events
    'sweep_row'              # One σ of a sweep finished
}
