// Branching on the low bit inside if conditions.
int main() {
  int n;
  int evens;
  int odds;
  n = *;
  n = n % 40;
  if (n < 0) {
    n = n + 40;
  }
  evens = 0;
  odds = 0;
  while (n > 0) {
    if ((n & 1) == 0) {
      evens++;
    } else {
      odds++;
    }
    n--;
  }
  assert(evens >= 0 && odds >= 0);
  assert(evens - odds <= 1 && odds - evens <= 1);
  return 0;
}
