"""Tests for the Twilio Energy Monitor."""
