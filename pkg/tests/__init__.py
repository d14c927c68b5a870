"""
Test suite for DSS Desktop Application
Includes unit tests, integration tests, E2E tests, and performance tests
"""
